"""Command-line interface: ``gradedsem <command> ...``.

Exit codes: 0 success, 1 validation failure or negative verdict, 2 parse
error, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import (
    DepthError,
    DiscreteRequired,
    FormulaSyntaxError,
    GradedSemError,
    InvalidStep,
    NotFound,
    ParseError,
    SemanticsMismatch,
    TermSyntaxError,
    ValidationError,
    WhitelistError,
    format_path,
)
from .graded import SEMANTICS, SEMANTICS_OF, behavioural_distance
from .logic.formula import WHITELISTS, parse_formula
from .logic.search import PropConfig, logical_distance, witness_search
from .logic.semantics import evaluate
from .metric import TensorKind, discrete_space, validate_metric
from .quanteq.proofs import load_proof
from .quanteq.theory import build_trace_theory, check_derivation
from .repro import default_scenarios, run_scenario
from .systems import load_system, validate_system

OK, FAIL, PARSE, INTERNAL = 0, 1, 2, 3


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print("\n".join(lines))


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _system_and_sem(args):
    c = load_system(args.system)
    sem = args.sem or SEMANTICS_OF[c.kind]
    for s in (args.source, args.target):
        if s is not None and s not in c.states:
            raise ValidationError([f"unknown state {s!r}"])
    return c, sem


def _prop_config(args, sem) -> PropConfig:
    if args.props == "none":
        ops = frozenset()
    elif args.props == "all":
        ops = WHITELISTS[sem]
    else:
        ops = frozenset(o.strip() for o in args.props.split(",") if o.strip())
        bad = ops - WHITELISTS[sem]
        if bad:
            raise WhitelistError(f"operator(s) {', '.join(sorted(bad))} not allowed under {sem}")
    return PropConfig(ops=ops, grid=args.grid, extra_size=args.extra_size, max_per_layer=args.max_per_layer)


def cmd_dist(args) -> int:
    c, sem = _system_and_sem(args)
    bd = behavioural_distance(c, sem, args.source, args.target, args.depth)
    rows = [f"{'n':>3}  {'d_n':>9}  {'max':>9}"]
    rows += [f"{n:>3}  {_fmt(d)}  {_fmt(m)}" for n, (d, m) in enumerate(zip(bd.per_depth, bd.running_max))]
    rows.append(f"max {_fmt(bd.max)} at n={bd.argmax} (lower bound for the unbounded supremum)")
    _emit(args, {"semantics": sem, "from": args.source, "to": args.target, "per_depth": list(bd.per_depth),
                 "running_max": list(bd.running_max), "max": bd.max, "argmax": bd.argmax}, rows)
    return OK


def cmd_logic(args) -> int:
    c, sem = _system_and_sem(args)
    cfg = _prop_config(args, sem)
    ld = logical_distance(c, sem, args.source, args.target, args.depth, cfg)
    bd = behavioural_distance(c, sem, args.source, args.target, args.depth)
    gap = ld.value < bd.max - max(args.tol, 1e-6)
    rows = [f"logical  {_fmt(ld.value)}  via {ld.formula}",
            f"behav.   {_fmt(bd.max)}" + ("  GAP" if gap else "")]
    _emit(args, {"semantics": sem, "logical": ld.value, "formula": str(ld.formula), "behavioural": bd.max,
                 "gap": gap, "per_depth": list(ld.per_depth)}, rows)
    return OK


def cmd_eval(args) -> int:
    c, sem = _system_and_sem(args)
    phi = parse_formula(args.formula, sem)
    vals = evaluate(phi, c, sem)
    _emit(args, {"formula": str(phi), "depth": phi.depth, "values": vals},
          [f"{phi}  (depth {phi.depth})"] + [f"  {x}: {_fmt(v)}" for x, v in vals.items()])
    return OK


def cmd_witness(args) -> int:
    c, sem = _system_and_sem(args)
    cfg = _prop_config(args, sem)
    target = args.target_value
    if target is None:
        target = behavioural_distance(c, sem, args.source, args.target, args.depth).max
    try:
        phi = witness_search(c, sem, args.source, args.target, args.depth, target, cfg)
    except NotFound as e:
        _emit(args, {"found": False, "target": target, "best_gap": e.best_gap, "best_formula": str(e.best_formula)},
              [f"no witness for {_fmt(target)}; best gap {_fmt(e.best_gap)} via {e.best_formula}"])
        return FAIL
    vals = evaluate(phi, c, sem)
    gap = abs(vals[args.source] - vals[args.target])
    _emit(args, {"found": True, "target": target, "formula": str(phi), "gap": gap},
          [f"witness {phi} with gap {_fmt(gap)} (target {_fmt(target)})"])
    return OK


def _label_space(args):
    names = [n.strip() for n in args.labels.split(",") if n.strip()]
    spec = args.label_metric
    if spec == "discrete":
        return discrete_space(names)
    try:
        val = json.loads(spec)
    except json.JSONDecodeError as e:
        raise ParseError(f"--label-metric must be 'discrete', a number or a JSON matrix: {e}") from e
    if isinstance(val, (int, float)):
        n = len(names)
        val = [[0 if i == j else val for j in range(n)] for i in range(n)]
    return validate_metric(names, val)


def cmd_check(args) -> int:
    proof = load_proof(args.proof)
    T = build_trace_theory(args.theory, _label_space(args), TensorKind(args.tensor, args.discount))
    try:
        check_derivation(T, proof)
    except InvalidStep as e:
        _emit(args, {"valid": False, "path": format_path(e.path), "reason": e.reason},
              [f"INVALID at {format_path(e.path)}: {e.reason}"])
        return FAIL
    j = proof.conclusion
    _emit(args, {"valid": True, "lhs": str(j.lhs), "rhs": str(j.rhs), "eps": j.eps},
          [f"VALID  {j.lhs} =_{j.eps:g} {j.rhs}"])
    return OK


def cmd_repro(args) -> int:
    names = default_scenarios() if args.scenario == "all" else [args.scenario]
    reports = []
    for name in names:
        try:
            reports.append(run_scenario(name))
        except ValueError as e:
            raise ParseError(str(e)) from e
    lines = []
    for r in reports:
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.scenario}")
        for e, got, ok in r.checks():
            lines.append(f"    {e.name}: {got:.9g} {e.relation} {e.value:.9g} ± {e.tol:g}  {'ok' if ok else 'MISMATCH'}")
        shown = {e.name for e in r.expected}
        lines += [f"    {n}: {v:.9g}" for n, v in r.computed if n not in shown]
    _emit(args, {"reports": [r.to_json() for r in reports]}, lines)
    return OK if all(r.passed for r in reports) else FAIL


def cmd_validate(args) -> int:
    try:
        c = load_system(args.system)
    except ValidationError as e:
        _emit(args, {"valid": False, "findings": [str(f) for f in e.findings]},
              ["INVALID"] + [f"  {f}" for f in e.findings])
        return FAIL
    findings = validate_system(c)
    _emit(args, {"valid": not findings, "kind": c.kind, "states": len(c.states),
                 "findings": [str(f) for f in findings]},
          [f"{'VALID' if not findings else 'INVALID'} {c.kind} with {len(c.states)} states"]
          + [f"  {f}" for f in findings])
    return FAIL if findings else OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=4, help="depth bound (default 4)")
    common.add_argument("--grid", type=float, default=0.05, help="constant grid for operators (default 0.05)")
    common.add_argument("--tol", type=float, default=1e-9, help="absolute tolerance (default 1e-9)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="gradedsem", description="Graded behavioural distances and logics.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def system_cmd(name, fn, help_, pair=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("system", help="system JSON file")
        if pair:
            sp.add_argument("source", help="first state")
            sp.add_argument("target", help="second state")
        sp.add_argument("--sem", choices=SEMANTICS, help="semantics (default: the system kind's)")
        sp.set_defaults(func=fn, source=None, target=None)
        return sp

    def props(sp):
        sp.add_argument("--props", default="none", help="'none', 'all' or a comma list of operators")
        sp.add_argument("--extra-size", type=int, default=2, help="extra formula size for operators")
        sp.add_argument("--max-per-layer", type=int, default=64, help="distinct formulas kept per depth")

    system_cmd("dist", cmd_dist, "per-depth behavioural distance")
    props(system_cmd("logic", cmd_logic, "bounded logical distance and best formula"))
    sp = system_cmd("eval", cmd_eval, "evaluate a formula at every state", pair=False)
    sp.add_argument("formula")
    sp = system_cmd("witness", cmd_witness, "search for a distinguishing formula")
    sp.add_argument("--target-value", type=float, help="gap to reach (default: behavioural distance)")
    props(sp)
    system_cmd("validate", cmd_validate, "load and validate a system file", pair=False)

    sp = sub.add_parser("check", parents=[common], help="check a derivation")
    sp.add_argument("proof", help="proof JSON file")
    sp.add_argument("--theory", choices=("powerset", "fuzzy", "dist"), default="dist")
    sp.add_argument("--labels", default="a,b", help="comma-separated label names")
    sp.add_argument("--label-metric", default="discrete", help="'discrete', one off-diagonal distance, or a JSON matrix")
    sp.add_argument("--tensor", choices=("sup", "manhattan", "euclidean"), default="manhattan")
    sp.add_argument("--discount", type=float, default=1.0)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("repro", parents=[common], help="reproduce a reference scenario")
    sp.add_argument("scenario", nargs="?", default="all",
                    help="stream, kantorovich_sup, fig1_discrete, fig1_metric(v), coupling_bound(v[,grid]) or all")
    sp.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return PARSE if e.code not in (0, None) else OK
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return FAIL
    except (ParseError, FormulaSyntaxError, TermSyntaxError, DepthError, WhitelistError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return PARSE
    except (SemanticsMismatch, DiscreteRequired) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return FAIL
    except GradedSemError as e:
        print(f"error: {e}", file=sys.stderr)
        return INTERNAL
    except Exception as e:  # noqa: BLE001 - last-resort exit code
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return INTERNAL


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
