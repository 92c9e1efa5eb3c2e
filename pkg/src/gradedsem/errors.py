"""Exception hierarchy shared by all modules."""


class GradedSemError(Exception):
    """Base class for every error raised by this package."""


# metric core
class MetricError(GradedSemError, ValueError):
    """A matrix fails one of the pseudometric axioms."""


class RangeError(MetricError):
    pass


class ReflexivityError(MetricError):
    pass


class AsymmetryError(MetricError):
    pass


class TriangleError(MetricError):
    pass


class SeparationError(MetricError):
    pass


class SizeError(GradedSemError):
    """An eager enumeration would exceed the configured cap."""


class NonexpansiveInputError(GradedSemError, ValueError):
    pass


# liftings
class SolverError(GradedSemError):
    """The transport solver produced a certificate with a duality gap."""


# systems
class ParseError(GradedSemError):
    pass


class ValidationError(GradedSemError):
    def __init__(self, findings):
        self.findings = list(findings)
        super().__init__("; ".join(str(f) for f in self.findings))


# graded semantics / logic
class SemanticsMismatch(GradedSemError):
    pass


class FormulaSyntaxError(GradedSemError, SyntaxError):
    pass


class DepthError(GradedSemError):
    """A formula or term has no uniform depth."""


class WhitelistError(GradedSemError):
    pass


class NotFound(GradedSemError):
    """Witness search exhausted the enumeration without reaching the target."""

    def __init__(self, best_gap, best_formula):
        self.best_gap = best_gap
        self.best_formula = best_formula
        super().__init__(f"no witness found; best gap {best_gap:.6g} via {best_formula}")


# quantitative equational logic
class DiscreteRequired(GradedSemError):
    pass


class DepthMismatch(GradedSemError):
    pass


class TermSyntaxError(GradedSemError, SyntaxError):
    pass


class InvalidStep(GradedSemError):
    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason
        super().__init__(f"invalid step at {format_path(self.path)}: {reason}")


class ArchUnsupported(InvalidStep):
    def __init__(self, path):
        super().__init__(path, "rule 'arch' is not accepted in proof objects")


def format_path(path):
    return "root" if not path else "root." + ".".join(str(i) for i in path)
