"""Command-line interface.

Usage::

    entroprel solve SCENARIO [--out DIR]
    entroprel evaluate SCENARIO --lambda1 X --lambda2 Y [--out DIR] [--format csv|json]
    entroprel charging-time SCENARIO
    entroprel oracle SCENARIO [--steps N]
    entroprel report SCENARIO [--out DIR] [--lambda1 X --lambda2 Y]

``SCENARIO`` is a path to a scenario JSON file, or ``@case_study`` for the
bundled case study.

Exit codes: 0 success, 1 unreadable or invalid input, 2 optimizer did not
converge (or, for ``oracle``, was beaten by the grid), 3 the resulting
multipliers fail the validity checks. Set ``ENTROPREL_LOG`` to ``quiet``
(default), ``info`` or ``trace`` for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from .charging import session_summary
from .exceptions import EntroprelError
from .io import (
    ScenarioDocument,
    emit_component_failure,
    emit_failure_table,
    emit_reliability_curve,
    emit_stress_table,
    load_scenario,
    write_text,
)
from .maxent import check_validity, failure_matrix
from .model import MultiplierPair
from .optimizer import ConvergenceReason, estimate_multipliers, objective_terms
from .reliability import identify_weakest_component, reliability_curve
from .validation import GridSpec, default_grid, grid_search, refine_until

logger = logging.getLogger("entroprel")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_INVALID = 3

DOMINANCE_TOL = 1e-3

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}


def _configure_logging():
    level = _LOG_LEVELS.get(os.environ.get("ENTROPREL_LOG", "quiet").lower(), logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False


def bundled_case_study() -> Path:
    return Path(str(resources.files("entroprel") / "data" / "case_study.json"))


def _load(spec: str) -> ScenarioDocument:
    if spec == "@case_study":
        return load_scenario(bundled_case_study())
    return load_scenario(spec)


def _results(doc: ScenarioDocument, multipliers: MultiplierPair, run=None) -> dict:
    """All output documents for one multiplier pair, keyed by file name."""
    scenario = doc.scenario
    matrix = failure_matrix(scenario, multipliers)
    validity = check_validity(scenario, multipliers)
    terms = objective_terms(multipliers, scenario, doc.options)
    weakest = identify_weakest_component(scenario, matrix)

    summary = {
        "lambda1": multipliers.lambda1,
        "lambda2": multipliers.lambda2,
        "objective": terms.value,
        "residuals": {
            "pf": terms.f1 - scenario.network_failure_probability,
            "loss": terms.f2 - scenario.expected_loss,
        },
        "achieved": {"pf_linear": terms.f1, "loss": terms.f2},
        "penalty_total": terms.penalty_total,
        "convergence_reason": run.convergence_reason.value if run else None,
        "iterations": run.iterations if run else 0,
        "validity": validity.to_dict(),
        "weakest_component": weakest.name,
    }

    files = {
        "multipliers.json": json.dumps(summary, indent=2) + "\n",
        "failure_table.csv": emit_failure_table(matrix, scenario.names),
    }
    try:
        curve = reliability_curve(scenario, matrix)
    except EntroprelError as err:
        logger.warning("reliability outputs skipped: %s", err)
    else:
        summary["network_failure_exact"] = curve.network_failure_exact
        summary["network_failure_linear"] = curve.network_failure_linear
        summary["entropy_nats"] = curve.entropy_nats
        files["multipliers.json"] = json.dumps(summary, indent=2) + "\n"
        files["reliability_curve.csv"] = emit_reliability_curve(curve.per_level)
        files["component_failure.csv"] = emit_component_failure(
            scenario, curve.per_component_failure, weakest.row_sums, weakest.index)
    return {"files": files, "validity": validity, "summary": summary}


def _write_all(out_dir, files: dict):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        write_text(out / name, text)
        logger.info("wrote %s", out / name)


def _exit_for(run, validity) -> int:
    if run is not None and run.convergence_reason is ConvergenceReason.MAX_ITERATIONS:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if validity.overall_valid else EXIT_INVALID


def cmd_solve(args) -> int:
    doc = _load(args.scenario)
    run = estimate_multipliers(doc.scenario, doc.options)
    result = _results(doc, run.final_multipliers, run)
    if args.out:
        _write_all(args.out, result["files"])
    sys.stdout.write(result["files"]["multipliers.json"])
    return _exit_for(run, result["validity"])


def cmd_evaluate(args) -> int:
    doc = _load(args.scenario)
    pair = MultiplierPair(args.lambda1, args.lambda2)
    result = _results(doc, pair)
    if args.out:
        _write_all(args.out, result["files"])
    if args.format == "json":
        sys.stdout.write(emit_failure_table(failure_matrix(doc.scenario, pair), doc.scenario.names, "json"))
    else:
        sys.stdout.write(result["files"]["failure_table.csv"])
    return _exit_for(None, result["validity"])


def cmd_charging_time(args) -> int:
    doc = _load(args.scenario)
    if doc.charging is None:
        print("error: scenario has no 'charging' block", file=sys.stderr)
        return EXIT_INPUT
    s = session_summary(doc.charging, doc.granularity_h)
    print(f"energy_needed_kwh={s['energy_kwh']:.6f}")
    print(f"expected_hours={s['expected_hours']:.6f}")
    print(f"stress_levels={s['stress_levels']}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = _load(args.scenario)
    options = doc.options
    grid = default_grid(doc.scenario, options, steps=args.steps)
    if args.lambda1_range or args.lambda2_range:
        grid = GridSpec(tuple(args.lambda1_range or grid.lambda1_range),
                        tuple(args.lambda2_range or grid.lambda2_range), args.steps)
    coarse = grid_search(doc.scenario, options, grid)
    rounds = refine_until(doc.scenario, options, coarse) if args.refine else [coarse]
    best = rounds[-1]
    run = estimate_multipliers(doc.scenario, options)
    gap = run.final_objective - best.objective
    report = {
        "grid": {
            "lambda1_range": list(grid.lambda1_range),
            "lambda2_range": list(grid.lambda2_range),
            "steps_per_axis": grid.steps_per_axis,
            "refinement_rounds": len(rounds) - 1,
            "best_lambda1": best.multipliers.lambda1,
            "best_lambda2": best.multipliers.lambda2,
            "best_objective": best.objective,
        },
        "optimizer": {
            "lambda1": run.final_multipliers.lambda1,
            "lambda2": run.final_multipliers.lambda2,
            "objective": run.final_objective,
            "convergence_reason": run.convergence_reason.value,
            "iterations": run.iterations,
        },
        "dominance_gap": gap,
        "optimizer_not_dominated": gap <= DOMINANCE_TOL,
    }
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK if gap <= DOMINANCE_TOL else EXIT_NOT_CONVERGED


def cmd_report(args) -> int:
    doc = _load(args.scenario)
    run = None
    if args.lambda1 is not None and args.lambda2 is not None:
        pair = MultiplierPair(args.lambda1, args.lambda2)
    elif args.lambda1 is not None or args.lambda2 is not None:
        print("error: give both --lambda1 and --lambda2, or neither", file=sys.stderr)
        return EXIT_INPUT
    else:
        run = estimate_multipliers(doc.scenario, doc.options)
        pair = run.final_multipliers
    result = _results(doc, pair, run)
    files = dict(result["files"])
    files["stress_table.csv"] = emit_stress_table(doc.scenario)
    _write_all(args.out, files)
    for name in sorted(files):
        print(Path(args.out) / name)
    return _exit_for(run, result["validity"])


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with other input errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="entroprel",
        description="Maximum-entropy failure probabilities and series-system reliability.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="estimate the multipliers and write all tables")
    p.add_argument("scenario")
    p.add_argument("--out", help="directory for output files")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", help="tables for given multipliers, no optimisation")
    p.add_argument("scenario")
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--out", help="directory for output files")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="stdout table format")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("charging-time", help="energy, expected duration and stress levels")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_charging_time)

    p = sub.add_parser("oracle", help="grid search and dominance check against solve")
    p.add_argument("scenario")
    p.add_argument("--steps", type=int, default=400, help="lattice points per axis (default 400)")
    p.add_argument("--lambda1-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--lambda2-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--no-refine", dest="refine", action="store_false", help="skip nested refinement")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="full pipeline plus plot-ready CSVs")
    p.add_argument("scenario")
    p.add_argument("--out", default="report", help="output directory (default: report)")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.set_defaults(func=cmd_report)
    return parser


def run_cli(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EntroprelError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None):
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
