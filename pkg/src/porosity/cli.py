"""Command-line driver: parse set specs, run analyses, emit reports.

Set documents are JSON {"kind": ..., "params": {...}} with kind one of
geometric | power-decay | super-geometric | factorial-decay | explicit |
doubled | union | rescaled | prop28 and rationals encoded as decimal-free
"p/q" strings (see README for the per-kind parameters).

Exit codes: 0 success (indeterminate verdicts are success with flags),
2 invalid input, 3 bit budget exceeded, 4 identity-suite failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .constructions import prop28_family
from .errors import BitBudgetExceeded, PorosityError
from .gaps import largest_gap_length, porosity_plus
from .metrics import classify_csp, cover_ratio_supremum
from .plotting import default_figure_path, render_figure, write_plot_data
from .pretangent import sample_radius_bounds
from .rational import (
    DEFAULT_BIT_BUDGET,
    DEFAULT_DEPTH,
    DEFAULT_EPSILON,
    DEFAULT_TOL,
    Q,
    deep_start,
    parse_rational,
)
from .report import AnalysisReport, certificate_doc, porosity_doc, write_atomic
from .sets import NO, SetSpec, make_set, require_points
from .verify import SUITES, run_suite

_CONSTRUCT_RULES = {
    "n2": SetSpec("super-geometric", {"exponent_coeffs": [0, 0, 1]}),
    "n3": SetSpec("super-geometric", {"exponent_coeffs": [0, 0, 0, 1]}),
    "factorial": SetSpec("factorial-decay", {}),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="porosity",
        description=(
            "Exact one-sided porosity structure of subsets of the positive "
            "reals near 0, with certificates"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_set: bool = True):
        if with_set:
            p.add_argument("--set", required=True, help="SetSpec JSON file")
        p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
        p.add_argument("--epsilon", type=str, default=str(DEFAULT_EPSILON))
        p.add_argument("--tol", type=str, default=str(DEFAULT_TOL))
        p.add_argument("--bits", type=int, default=DEFAULT_BIT_BUDGET)
        p.add_argument("--out", type=str, default=None, help="report JSON path")
        p.add_argument(
            "--timings", action="store_true",
            help="include wall times (breaks byte-determinism of reports)",
        )

    analyze = sub.add_parser("analyze", help="gaps, porosity estimate, quantities")
    common(analyze)
    analyze.add_argument("--plot", type=str, default=None, help="TSV plot-data path")
    analyze.add_argument(
        "--figure", type=str, default=None,
        help="figure path (default: plot path with .png)",
    )

    classify = sub.add_parser("classify", help="porosity classification certificate")
    common(classify)

    construct = sub.add_parser("construct", help="emit a named example SetSpec")
    construct.add_argument(
        "name",
        choices=[
            "geometric",
            "ratio-vanishing",
            "doubled",
            "prop28-e1",
            "prop28-e1-star",
            "prop28-union",
        ],
    )
    construct.add_argument("--rule", choices=sorted(_CONSTRUCT_RULES), default="n2")
    construct.add_argument("--ratio", type=str, default="1/2")
    construct.add_argument("--factor", type=str, default="2")
    construct.add_argument("--out", type=str, required=True)

    simulate = sub.add_parser("simulate", help="pretangent sampling over scalings")
    common(simulate)
    simulate.add_argument("--trials", type=int, default=8)

    verify = sub.add_parser("verify", help="run the bundled identity suites")
    verify.add_argument("--suite", choices=sorted(SUITES), default="all")
    verify.add_argument("--depth", type=int, default=None, help="accepted for symmetry")
    verify.add_argument("--out", type=str, default=None)
    return parser


def _load_set(args) -> tuple:
    with open(args.set) as handle:
        doc = json.load(handle)
    spec = SetSpec.from_json(doc)
    E = make_set(spec, bit_budget=args.bits)
    return spec, E


def _params_doc(args) -> dict:
    return {
        "depth": args.depth,
        "epsilon": str(parse_rational(args.epsilon)),
        "tol": str(parse_rational(args.tol)),
        "bit_budget": args.bits,
    }


def _emit(report: AnalysisReport, out: str | None) -> None:
    text = report.dumps()
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args) -> int:
    spec, E = _load_set(args)
    depth = args.depth
    epsilon = parse_rational(args.epsilon)
    tol = parse_rational(args.tol)
    stages: dict[str, float] = {}

    porosity = None
    quantities: dict = {}
    witnesses: dict = {}
    rows: list[tuple[Q, Q]] = []
    started = time.perf_counter()
    if E.zero_isolated == NO:
        estimate = porosity_plus(E, depth=depth, tol=tol)
        porosity = porosity_doc(estimate)
        points = require_points(E, depth)
        for j in range(deep_start(depth), depth - 1):
            h = points[j]
            rows.append((h, largest_gap_length(E, h, depth).value / h))
    stages["porosity"] = time.perf_counter() - started

    started = time.perf_counter()
    cert = classify_csp(E, depth=depth, epsilon=epsilon, tol=tol)
    stages["classify"] = time.perf_counter() - started

    started = time.perf_counter()
    if E.zero_isolated == NO:
        cover = cover_ratio_supremum(E, depth=depth, epsilon=epsilon)
        pinned = cert.verdict == "csp" and cert.C_E_value == cover.value
        quantities["C_E"] = {
            "value": "inf" if cover.infinite else str(cover.value),
            "provenance": "identity-pinned" if pinned else "sampled-lower-bound",
        }
        if cert.M_value is not None:
            quantities["M"] = {
                "value": str(cert.M_value),
                "converged": bool(cert.M_converged),
            }
        bounds = sample_radius_bounds(E, depth=depth, tol=tol, epsilon=epsilon)
        attained = bounds.cover_value is not None and bounds.R_star == bounds.cover_value
        quantities["R_star"] = {
            "value": str(bounds.R_star),
            "provenance": "witness-attained" if attained else "sampled-lower-bound",
        }
        quantities["R_low"] = {
            "value": "inf" if isinstance(bounds.R_low, float) else str(bounds.R_low),
            "provenance": "sampled",
        }
        witnesses["spaces"] = [
            {
                "label": s.label,
                "rho_star": str(s.rho_star),
                "rho_low": "inf" if isinstance(s.rho_low, float) else str(s.rho_low),
                "classes": s.class_count,
                "has_unit_class": s.has_unit_class,
            }
            for s in bounds.spaces
        ]
    stages["simulate"] = time.perf_counter() - started

    report = AnalysisReport(
        set_spec=spec.to_json(),
        parameters=_params_doc(args),
        porosity=porosity,
        csp=certificate_doc(cert),
        quantities=quantities,
        witnesses=witnesses,
        timings={k: round(v, 6) for k, v in stages.items()} if args.timings else None,
    )
    _emit(report, args.out)
    if args.plot:
        write_plot_data(args.plot, rows)
        if rows:
            figure = args.figure or default_figure_path(args.plot)
            title = f"{spec.kind} set, depth {depth}"
            estimate_value = parse_rational(porosity["p_plus"]) if porosity else None
            render_figure(figure, rows, estimate=estimate_value, title=title)
    return 0


def _cmd_classify(args) -> int:
    spec, E = _load_set(args)
    cert = classify_csp(
        E,
        depth=args.depth,
        epsilon=parse_rational(args.epsilon),
        tol=parse_rational(args.tol),
    )
    report = AnalysisReport(
        set_spec=spec.to_json(),
        parameters=_params_doc(args),
        csp=certificate_doc(cert),
    )
    _emit(report, args.out)
    return 0


def _cmd_construct(args) -> int:
    if args.name == "geometric":
        spec = SetSpec("geometric", {"ratio": parse_rational(args.ratio)})
    elif args.name == "ratio-vanishing":
        spec = _CONSTRUCT_RULES[args.rule]
    elif args.name == "doubled":
        spec = SetSpec(
            "doubled",
            {"base": _CONSTRUCT_RULES[args.rule], "factor": parse_rational(args.factor)},
        )
    else:
        member = {
            "prop28-e1": "e1",
            "prop28-e1-star": "e1-star",
            "prop28-union": "union",
        }[args.name]
        family = prop28_family()
        source = {
            "e1": family.E1,
            "e1-star": family.E1_star,
            "union": family.union,
        }[member]
        spec = source.spec
    make_set(spec)  # validate before writing
    write_atomic(args.out, json.dumps(spec.to_json(), indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_simulate(args) -> int:
    spec, E = _load_set(args)
    bounds = sample_radius_bounds(
        E,
        depth=args.depth,
        trials=args.trials,
        tol=parse_rational(args.tol),
        epsilon=parse_rational(args.epsilon),
    )
    report = AnalysisReport(
        set_spec=spec.to_json(),
        parameters={**_params_doc(args), "trials": args.trials},
        quantities={
            "R_star": str(bounds.R_star),
            "R_low": "inf" if isinstance(bounds.R_low, float) else str(bounds.R_low),
            "C_E": "inf" if bounds.cover_value is None else str(bounds.cover_value),
        },
        witnesses={
            "spaces": [
                {
                    "label": s.label,
                    "rho_star": str(s.rho_star),
                    "rho_low": "inf" if isinstance(s.rho_low, float) else str(s.rho_low),
                    "classes": s.class_count,
                    "has_unit_class": s.has_unit_class,
                }
                for s in bounds.spaces
            ]
        },
    )
    _emit(report, args.out)
    return 0


def _cmd_verify(args) -> int:
    results = run_suite(args.suite)
    for result in results:
        print(result.line())
    if args.out:
        doc = {
            "suite": args.suite,
            "results": [
                {
                    "criterion": r.criterion,
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                }
                for r in results
            ],
        }
        write_atomic(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0 if all(r.passed for r in results) else 4


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "classify": _cmd_classify,
        "construct": _cmd_construct,
        "simulate": _cmd_simulate,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except BitBudgetExceeded as error:
        print(f"error: {error}", file=sys.stderr)
        return 3
    except (PorosityError, OSError, json.JSONDecodeError, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
