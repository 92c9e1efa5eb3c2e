"""Graded behavioural distances, quantitative modal logics and graded equational reasoning."""
from .errors import GradedSemError
from .graded import (
    BehaviourAggregate,
    behaviour_map,
    behavioural_distance,
    binarize_distribution,
    depth_distance,
    kleisli_step,
)
from .liftings import (
    FinDist,
    FuzzySet,
    TransportCertificate,
    fuzzy_hausdorff_distance,
    hausdorff_distance,
    kantorovich_distance,
    lift_flatten,
    lift_map,
    lift_unit,
)
from .metric import (
    EUCLIDEAN,
    MANHATTAN,
    SUP,
    FinMetric,
    LabelSpace,
    TensorKind,
    check_initial_cone,
    check_nonexpansive,
    check_normed_isometric,
    discrete_space,
    k_tensor,
    trace_space,
    validate_metric,
)
from .systems import Coalgebra, load_system, save_system, validate_system

__version__ = "0.1.0"
