"""Command line interface: ``dynlab <command> ...``.

Every command prints a JSON report on stdout.  Exit codes: 0 success or
YES, 1 NO (with a witness in the report), 2 bad input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import config
from .fileformat import ParseError, parse_rational, parse_system_file, serialize_system
from .orbits import build_step_graph
from .recurrence import chain_classes, classify_system
from .reports import dumps, export_dot, jsonable, lasso_json, make_report, rational
from .shadowing import (
    decide_cg_shadowing,
    decide_eventual_shadowing,
    decide_shadowing,
    max_delta,
)
from .space import UnknownPointError, distance_spectrum
from .study import FAMILIES, parse_levels, run_refinement_study
from .system import InvalidSystem, build_example, circle_grid

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _positive_rational(text: str) -> Fraction:
    try:
        value = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return value


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(0, 0, f"cannot read {path}: {exc.strerror}") from None
    return parse_system_file(text)[2]


def _emit(report: dict) -> None:
    sys.stdout.write(dumps(report) + "\n")


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    f = _load(args.file)
    verdict = {
        "points": len(f.space),
        "permutation": f.is_permutation(),
        "spectrum": [rational(v) for v in distance_spectrum(f.space)],
    }
    _emit(make_report("validate", {"file": args.file}, "ok", time.perf_counter() - t0, certificate=verdict))
    return EXIT_OK


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    f = _load(args.file)
    inputs = {"file": args.file, "epsilon": args.epsilon, "delta": args.delta}
    if args.cg:
        v = decide_cg_shadowing(f, args.epsilon, args.delta)
        witness = None
        if not v:
            lab = f.space.labels
            witness = {"g": {lab[x]: lab[y] for x, y in enumerate(v.g.image)}, "start": lab[v.start]}
        report = make_report(
            "check-cg", inputs, "yes" if v else "no", time.perf_counter() - t0,
            certificate={"orbits_checked": v.orbits_checked} if v else None, witness=witness,
        )
    elif args.eventual:
        v = decide_eventual_shadowing(f, args.epsilon, args.delta)
        report = make_report(
            "check-eventual", inputs, "yes" if v else "no", time.perf_counter() - t0,
            certificate={"states": v.states} if v else None,
            witness=lasso_json(f, v.witness) if v.witness else None,
        )
    else:
        v = decide_shadowing(f, args.epsilon, args.delta)
        report = make_report(
            "check", inputs, "yes" if v else "no", time.perf_counter() - t0,
            certificate={"states": v.states} if v else None,
            witness=dict(lasso_json(f, v.witness), fails_at=v.fails_at) if v.witness else None,
        )
    _emit(report)
    return EXIT_OK if v else EXIT_NO


def cmd_max_delta(args) -> int:
    t0 = time.perf_counter()
    f = _load(args.file)
    md = max_delta(f, args.epsilon)
    _emit(
        make_report(
            "max-delta", {"file": args.file, "epsilon": args.epsilon},
            {"max_delta": rational(md.value), "attained": md.attained}, time.perf_counter() - t0,
        )
    )
    return EXIT_OK


def cmd_witness(args) -> int:
    t0 = time.perf_counter()
    f = _load(args.file)
    v = decide_shadowing(f, args.epsilon, args.delta)
    _emit(
        make_report(
            "witness", {"file": args.file, "epsilon": args.epsilon, "delta": args.delta},
            "none" if v else "found", time.perf_counter() - t0,
            witness=dict(lasso_json(f, v.witness), fails_at=v.fails_at) if v.witness else None,
        )
    )
    return EXIT_OK if v else EXIT_NO


def cmd_chains(args) -> int:
    t0 = time.perf_counter()
    f = _load(args.file)
    classes = chain_classes(f, args.delta)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(f, build_step_graph(f, args.delta), classes))
    lab = f.space.labels
    verdict = [
        {"members": sorted(lab[i] for i in c.members), "transitive": c.transitive, "minimal": c.minimal}
        for c in classes
    ]
    _emit(make_report("chains", {"file": args.file, "delta": args.delta}, verdict, time.perf_counter() - t0))
    return EXIT_OK


def cmd_classify(args) -> int:
    t0 = time.perf_counter()
    f = _load(args.file)
    rep = classify_system(f, args.horizon)
    _emit(make_report("classify", {"file": args.file, "horizon": rep.horizon},
                      jsonable(rep, f.space.labels), time.perf_counter() - t0))
    return EXIT_OK


_BUILD_ALIASES = {"cantor": "cantor_t", "interval": "interval_identity", "shift": "shift_to_limit"}


def cmd_build(args) -> int:
    t0 = time.perf_counter()
    family = _BUILD_ALIASES.get(args.family, args.family)
    if family == "circle":
        if args.n is None:
            raise InvalidSystem("circle needs --n")
        f = circle_grid(args.n, args.rotation or 0)
        spec = f"circle_grid({args.n}, {args.rotation or 0})"
    else:
        if family not in FAMILIES:
            raise InvalidSystem(f"unknown family {args.family!r}")
        level = {"cantor_identity": args.level, "cantor_t": args.level, "interval_identity": args.n,
                 "shift_to_limit": args.k, "cone": args.k}[family]
        if level is None:
            flag = {"cantor_identity": "--level", "cantor_t": "--level", "interval_identity": "--n"}.get(family, "--k")
            raise InvalidSystem(f"{family} needs {flag}")
        spec = FAMILIES[family].format(level)
        f = build_example(spec)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(serialize_system(f))
    _emit(make_report("build", {"family": family, "builder": spec}, "ok", time.perf_counter() - t0,
                      certificate={"points": len(f.space), "output": args.output}))
    return EXIT_OK


def cmd_study(args) -> int:
    t0 = time.perf_counter()
    eps = "spectrum" if args.epsilon == "spectrum" else _positive_rational(args.epsilon)
    table = run_refinement_study(args.family, parse_levels(args.levels), eps)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(table.to_csv())
    _emit(make_report("study", {"family": args.family, "levels": args.levels, "epsilon": args.epsilon},
                      [r.as_record() for r in table.rows], time.perf_counter() - t0))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynlab", description="Exact shadowing analysis of finite dynamical systems.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="parse and validate a system file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("check", help="decide (epsilon, delta)-shadowing")
    s.add_argument("file")
    s.add_argument("--epsilon", type=_positive_rational, required=True)
    s.add_argument("--delta", type=_positive_rational, required=True)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--eventual", action="store_true", help="decide eventual shadowing")
    mode.add_argument("--cg", action="store_true", help="decide shadowing of all delta-close maps' orbits")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("max-delta", help="largest workable delta for epsilon")
    s.add_argument("file")
    s.add_argument("--epsilon", type=_positive_rational, required=True)
    s.set_defaults(func=cmd_max_delta)

    s = sub.add_parser("witness", help="an unshadowable delta-pseudo-orbit, if any")
    s.add_argument("file")
    s.add_argument("--epsilon", type=_positive_rational, required=True)
    s.add_argument("--delta", type=_positive_rational, required=True)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("chains", help="chain classes of the delta-step graph")
    s.add_argument("file")
    s.add_argument("--delta", type=_positive_rational, required=True)
    s.add_argument("--dot", metavar="OUT.dot")
    s.set_defaults(func=cmd_chains)

    s = sub.add_parser("classify", help="recurrence / rigidity / iterate report")
    s.add_argument("file")
    s.add_argument("--horizon", type=int)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("build", help="write an example system file")
    s.add_argument("family", help="cantor_t, cantor_identity, interval_identity, shift_to_limit, cone, circle")
    s.add_argument("--level", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--rotation", type=parse_rational)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("study", help="largest workable delta across refinement levels")
    s.add_argument("family", choices=sorted(FAMILIES))
    s.add_argument("--levels", required=True, help="a..b or a,b,c")
    s.add_argument("--epsilon", required=True, help="p/q, or 'spectrum' for every distance")
    s.add_argument("--csv", metavar="OUT.csv")
    s.set_defaults(func=cmd_study)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except config.BudgetExceeded as exc:
        print(f"dynlab: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, InvalidSystem, UnknownPointError, ValueError, OSError) as exc:
        print(f"dynlab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
