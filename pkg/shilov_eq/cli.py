import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Optional

import shilov_eq.report as report
from shilov_eq import defaults
from shilov_eq._version import __version__
from shilov_eq.config import (
    Experiment_Config,
    dump_config,
    format_of,
    load_config,
    parse_target,
    with_overrides,
)
from shilov_eq.equidistribution import (
    corollary_band,
    eq_measure,
    measure_distance_check,
    theorem_harness,
)
from shilov_eq.errors import Computation_Error, Config_Error, Validation_Error
from shilov_eq.hahn import format_log_val, parse_log_val
from shilov_eq.linalg import diag_norm, pivot_trace, val_matrix
from shilov_eq.metrics import dominance, metric_distance, separating_section, shilov_set
from shilov_eq.polys import format_poly, mult_operator
from shilov_eq.properties import SUITES, run_suites
from shilov_eq.solver import solve_prescribed, solve_problem, solve_result_to_json

logger = logging.getLogger(__name__)


def _config(args: argparse.Namespace) -> Experiment_Config:
    if args.config is None:
        raise Config_Error(f"the {args.command} command needs --config")
    config = load_config(args.config)
    return with_overrides(
        config,
        n_max=args.nmax,
        tol=args.tol,
        prec=parse_log_val(args.prec) if args.prec is not None else None,
        target=parse_target(args.target) if args.target is not None else None,
    )


def _out(args: argparse.Namespace) -> report.Target:
    return args.out if args.out is not None else sys.stdout


def cmd_shilov(args: argparse.Namespace) -> int:
    config = _config(args)
    sigma = config.spec
    shilov = shilov_set(sigma)
    relations = [
        (i, j)
        for i, z in enumerate(sigma.points)
        for j, w in enumerate(sigma.points)
        if i != j and dominance(z, w)
    ]
    sections = {
        ",".join(str(a) for a in subset): format_poly(separating_section(sigma, subset))
        for subset in config.params.subsets
    }

    print(f"Shilov indices: {list(shilov.indices)}")
    for a, u in zip(shilov.indices, shilov.witnesses):
        print(f"  {a}: witness ({', '.join(str(u_j) for u_j in u)})")
    for i, j in relations:
        print(f"  point {i} is dominated by point {j}")
    for subset, text in sections.items():
        print(f"  separating section for {{{subset}}}: {text}")

    if args.out is not None:
        report.write_json(
            {
                "shilov": list(shilov.indices),
                "witnesses": [[str(u_j) for u_j in u] for u in shilov.witnesses],
                "dominated_by": [list(pair) for pair in relations],
                "separating_sections": sections,
            },
            args.out,
        )
    return 0


def cmd_lambda(args: argparse.Namespace) -> int:
    config = _config(args)
    sigma = config.spec
    mu = eq_measure(sigma, config.params.level)
    report.write_csv(report.lambda_frame(sigma, mu, config.params.level), _out(args))
    return 0


def cmd_limit(args: argparse.Namespace) -> int:
    config = _config(args)
    sigma, s, params = config.spec, config.section(), config.params
    harness = theorem_harness(
        sigma,
        s,
        n_max=params.n_max,
        cap=params.prec,
        workers=args.workers,
        progress=not args.quiet,
    )
    if args.out is not None and format_of(Path(args.out)) == "json":
        report.write_json(report.harness_to_json(harness), args.out)
    else:
        report.write_harness_csv(harness, _out(args))

    if args.pivots is not None:
        traces = {
            n: pivot_trace(
                val_matrix(
                    mult_operator(s, n), diag_norm(sigma, n), diag_norm(sigma, n + 1)
                ),
                cap=params.prec,
            )
            for n in range(1, params.n_max + 1)
        }
        report.write_json(report.pivots_to_json(traces), args.pivots)

    # without --out the report itself is on stdout
    stream = sys.stdout if args.out is not None else sys.stderr
    band = corollary_band(harness, sigma, s)
    print(f"rhs: {harness.rhs}", file=stream)
    print(
        f"fitted C: {band.C} (band scale {band.scale}), "
        f"n err_n in [{band.n_err_min}, {band.n_err_max}]",
        file=stream,
    )
    print(
        f"C over the first / last half: "
        f"{harness.constant_first_half} / {harness.constant_last_half}",
        file=stream,
    )
    print(f"certified: {harness.certified}", file=stream)
    return 0 if harness.certified else 1


def cmd_distance(args: argparse.Namespace) -> int:
    config = _config(args)
    if config.spec2 is None:
        raise Config_Error("the distance command needs a second metric under [[points2]]")
    distance = metric_distance(config.spec, config.spec2)
    data = {
        "d_inf": str(distance.d_inf),
        "d_1": str(distance.d_1),
        "exact": distance.exact,
        "d_mono": None,
        "bound": None,
    }
    if config.spec.d <= 2:
        check = measure_distance_check(config.spec, config.spec2)
        data.update(d_mono=str(check.d_mono), bound=str(check.bound))
    report.write_json(data, _out(args))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    config = _config(args)
    if config.params.target is None:
        raise Config_Error("the solve command needs a target (params.target or --target)")
    sigma = config.spec
    problem = solve_problem(
        sigma.d, [point.w for point in sigma.points], config.params.target
    )
    result = solve_prescribed(problem, tol=config.params.tol)
    report.write_json(solve_result_to_json(result), _out(args))
    return 0


def cmd_props(args: argparse.Namespace) -> int:
    results = run_suites(
        args.suite, instances=args.instances, seed=args.seed, progress=not args.quiet
    )
    summary = report.summary_frame(
        {r.name: (r.passed, r.total) for r in results},
        {r.name: r.gating for r in results},
    )
    summary["skipped"] = [r.skipped for r in results]
    print(summary.to_string(index=False))
    if args.out is not None:
        report.write_csv(summary, args.out)
    return 0 if all(r.ok for r in results) else 1


def cmd_export(args: argparse.Namespace) -> int:
    config = _config(args)
    fmt = args.format
    if fmt is None:
        fmt = format_of(Path(args.out)) if args.out is not None else "toml"
    text = dump_config(config, fmt)
    if args.out is not None:
        Path(args.out).expanduser().write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "shilov": (cmd_shilov, "Shilov points, witnesses, dominance and separating sections."),
    "lambda": (cmd_lambda, "Coefficients of the equidistribution measure, as CSV."),
    "limit": (cmd_limit, "Convergence report of the top wedge limit, as CSV or JSON."),
    "distance": (cmd_distance, "Distances between the two configured metrics, as JSON."),
    "solve": (cmd_solve, "Shifts realizing the target coefficients, as JSON."),
    "props": (cmd_props, "Run the randomized property suites."),
    "export": (cmd_export, "Write the configuration back as TOML or JSON."),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c",
        "--config",
        action="store",
        default=None,
        help="The experiment configuration, as TOML or (with a .json suffix) JSON.",
    )
    common.add_argument(
        "-o",
        "--out",
        action="store",
        default=None,
        help="Where to write the report. Defaults to standard output.",
    )
    common.add_argument(
        "--nmax", action="store", type=int, default=None, help="Largest degree n."
    )
    common.add_argument(
        "--tol", action="store", type=float, default=None, help="Solver tolerance."
    )
    common.add_argument(
        "--prec",
        action="store",
        default=None,
        help=f"Precision cap in val units (default {format_log_val(defaults.precision_cap)}).",
    )
    common.add_argument(
        "--target",
        action="store",
        default=None,
        help="Target coefficients of the solver, e.g. 3/4,1/4.",
    )
    common.add_argument(
        "--workers",
        action="store",
        type=int,
        default=defaults.workers,
        help="Number of worker processes for independent degrees.",
    )
    common.add_argument(
        "--seed", action="store", type=int, default=0, help="Seed of the property suites."
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", help="Log debugging information."
    )
    common.add_argument("-q", "--quiet", action="store_true", help="Hide progress bars.")

    parser = argparse.ArgumentParser(
        prog="shilov-eq",
        description="Exact computations for Shilov-finite metrics on O(1) over P^d.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version="%(prog)s {version}".format(version=__version__),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        subparser = subparsers.add_parser(name, parents=[common], help=help_text)
        if name == "limit":
            subparser.add_argument(
                "--pivots",
                action="store",
                default=None,
                help="Also dump the pivot sequence of every degree to this JSON file.",
            )
        elif name == "props":
            subparser.add_argument(
                "--suite",
                action="append",
                choices=list(SUITES),
                default=None,
                help="Run only this suite; may be given several times.",
            )
            subparser.add_argument(
                "--instances",
                action="store",
                type=int,
                default=None,
                help="Instances per suite, instead of each suite's default.",
            )
        elif name == "export":
            subparser.add_argument(
                "--format", action="store", choices=["toml", "json"], default=None
            )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    command, _ = COMMANDS[args.command]
    try:
        return command(args)
    except Validation_Error as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Computation_Error as e:
        print(f"computation failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
