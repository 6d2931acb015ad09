"""Command-line front end: JSON scenarios in, JSON/CSV reports out.

Exit codes: 0 success, 2 scenario validation failure, 3 solver internal
consistency failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

from .core import (
    DomainError,
    MarketModelError,
    MarketParams,
    SolverConsistencyError,
)
from .association import AllocationProfile, solve_association
from . import monopoly, oligopoly, welfare

SCHEMA_VERSION = 1

EXIT_VALIDATION = 2
EXIT_SOLVER = 3


class ScenarioError(MarketModelError):
    """Scenario file failed validation."""


def _fmt(x) -> str:
    return f"{x:.12g}"


def _require_keys(obj: dict, where: str, required, optional=()):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    for key in required:
        if key not in obj:
            raise ScenarioError(f"{where}: missing required field '{key}'")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise ScenarioError(f"{where}: unknown field '{key}'")


def load_scenario(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    _require_keys(
        raw, "scenario", ["schema_version", "params"],
        ["associate", "monopoly", "nash", "planner", "sweep"],
    )
    if raw["schema_version"] != SCHEMA_VERSION:
        raise ScenarioError(
            f"unsupported schema_version {raw['schema_version']!r} "
            f"(expected {SCHEMA_VERSION})"
        )
    _require_keys(
        raw["params"], "params",
        ["alpha", "n_fixed", "n_mobile", "r0", "lambda_s", "lambda_u"],
    )
    return raw


def scenario_params(raw: dict) -> MarketParams:
    try:
        return MarketParams(**raw["params"])
    except DomainError as exc:
        raise ScenarioError(f"params: {exc}") from exc


def _section(raw: dict, name: str) -> dict:
    if name not in raw:
        raise ScenarioError(f"scenario has no '{name}' section")
    return raw[name]


def _outcome_dict(outcome) -> dict:
    return {
        "regime": outcome.regime.value,
        "k_macro": outcome.k_macro,
        "k_small": outcome.k_small,
        "k_unlicensed": outcome.k_unlicensed,
        "r_macro": outcome.r_macro,
        "r_small": outcome.r_small,
        "r_unlicensed": outcome.r_unlicensed,
        "p_macro": outcome.p_macro,
        "p_small": outcome.p_small,
        "revenue_per_sp": list(outcome.revenue_per_sp),
        "social_welfare": outcome.social_welfare,
    }


def _allocation_dict(profile: AllocationProfile) -> dict:
    return {
        "per_sp": [[bm, bs] for bm, bs in profile.per_sp],
        "b_unlicensed": profile.b_unlicensed,
    }


def cmd_associate(raw: dict, params: MarketParams) -> dict:
    sec = _section(raw, "associate")
    _require_keys(sec, "associate", ["per_sp"], ["b_unlicensed"])
    try:
        profile = AllocationProfile(sec["per_sp"], sec.get("b_unlicensed", 0.0))
    except (DomainError, TypeError, ValueError) as exc:
        raise ScenarioError(f"associate: {exc}") from exc
    outcome = solve_association(profile, params)
    return {
        "allocation": _allocation_dict(profile),
        "outcome": _outcome_dict(outcome),
    }


def cmd_monopoly(raw: dict, params: MarketParams) -> dict:
    sec = _section(raw, "monopoly")
    _require_keys(sec, "monopoly", ["total_bandwidth"], ["b_unlicensed", "objective"])
    objective = sec.get("objective", "revenue")
    b_u = sec.get("b_unlicensed", 0.0)
    if objective == "revenue":
        sol = monopoly.optimize_revenue(sec["total_bandwidth"], b_u, params)
    elif objective == "social_welfare":
        sol = monopoly.optimize_welfare(sec["total_bandwidth"], b_u, params)
    else:
        raise ScenarioError(f"monopoly: unknown objective {objective!r}")
    return {
        "objective": sol.objective.value,
        "b_macro": sol.b_macro,
        "b_small": sol.b_small,
        "boundary": sol.boundary,
        "allocation": _allocation_dict(
            AllocationProfile([(sol.b_macro, sol.b_small)], b_u)
        ),
        "outcome": _outcome_dict(sol.outcome),
    }


def cmd_nash(raw: dict, params: MarketParams) -> dict:
    sec = _section(raw, "nash")
    _require_keys(sec, "nash", ["bandwidths"], ["b_unlicensed"])
    result = oligopoly.solve_nash(
        sec["bandwidths"], sec.get("b_unlicensed", 0.0), params
    )
    return {
        "classification": result.classification.value,
        "macro_only_set": sorted(result.macro_only_set),
        "kkt_residuals": list(result.kkt_residuals),
        "allocation": _allocation_dict(result.profile),
        "outcome": _outcome_dict(result.outcome),
    }


def cmd_planner(raw: dict, params: MarketParams) -> dict:
    sec = _section(raw, "planner")
    _require_keys(sec, "planner", ["total_bandwidth"])
    sol = welfare.planner_optimal(sec["total_bandwidth"], params)
    report = {
        "case": sol.case_label.value,
        "b_macro": sol.b_macro,
        "b_small": sol.b_small,
        "b_unlicensed": sol.b_unlicensed,
        "welfare": sol.welfare,
    }
    if sol.alternative is not None:
        report["alternative"] = {
            "b_small": sol.alternative[0],
            "b_unlicensed": sol.alternative[1],
        }
    return report


def _sweep_point(args):
    B, b_u, label, params = args
    return welfare.market_welfare(B, b_u, None, params, series=label)


def cmd_sweep(raw: dict, params: MarketParams, grid_override=None, jobs: int = 1):
    sec = _section(raw, "sweep")
    _require_keys(sec, "sweep", ["total_bandwidth"], ["series", "grid"])
    B = sec["total_bandwidth"]
    series = sec.get("series", list(welfare.DEFAULT_SERIES))
    points = grid_override or sec.get("grid", 201)
    grid = welfare.default_grid(B, points)

    if jobs > 1:
        tasks = [(B, b_u, label, params) for label in series for b_u in grid]
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            flat = list(pool.map(_sweep_point, tasks, chunksize=16))
        values = {
            label: flat[i * len(grid):(i + 1) * len(grid)]
            for i, label in enumerate(series)
        }
        kinks = {
            label: welfare.find_kink(label, B, params)
            for label in series
            if label != welfare.SERIES_PLANNER
        }
        curve = welfare.WelfareCurve(grid=tuple(grid), series=values, kinks=kinks)
    else:
        curve = welfare.welfare_sweep(B, grid, series, params)
    return curve, series


def sweep_csv(curve, series) -> str:
    kink_labels = [s for s in series if s != welfare.SERIES_PLANNER]
    header = ["b_u"] + list(series) + [f"kink_{s}" for s in kink_labels]
    kink_cells = [
        _fmt(curve.kinks[s]) if curve.kinks[s] is not None else "nan"
        for s in kink_labels
    ]
    lines = [",".join(header)]
    for i, b_u in enumerate(curve.grid):
        row = [_fmt(b_u)] + [_fmt(curve.series[s][i]) for s in series] + kink_cells
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def sweep_json(curve, series) -> dict:
    return {
        "grid": list(curve.grid),
        "series": {s: list(curve.series[s]) for s in series},
        "kinks": dict(curve.kinks),
    }


# Canonical scenario files matching the published parameter sets.
_FIGURE_SCENARIOS = {
    "fig2_nash_regions.json": {
        "schema_version": 1,
        "params": {"alpha": 0.5, "n_fixed": 50, "n_mobile": 50, "r0": 50,
                   "lambda_s": 4, "lambda_u": 3},
        "nash": {"bandwidths": [1.0, 1.0], "b_unlicensed": 1.0},
    },
    "fig3_equal_multipliers.json": {
        "schema_version": 1,
        "params": {"alpha": 0.5, "n_fixed": 50, "n_mobile": 50, "r0": 50,
                   "lambda_s": 4, "lambda_u": 4},
        "sweep": {"total_bandwidth": 2.0, "grid": 201,
                  "series": ["planner", "n1_rev", "n2", "ninf"]},
    },
    "fig4_unlicensed_strong.json": {
        "schema_version": 1,
        "params": {"alpha": 0.8, "n_fixed": 50, "n_mobile": 50, "r0": 50,
                   "lambda_s": 4, "lambda_u": 10},
        "sweep": {"total_bandwidth": 2.0, "grid": 201,
                  "series": ["planner", "n1_rev", "n2", "ninf"]},
    },
    "fig5_unlicensed_slight.json": {
        "schema_version": 1,
        "params": {"alpha": 0.8, "n_fixed": 50, "n_mobile": 50, "r0": 50,
                   "lambda_s": 4, "lambda_u": 4.5},
        "sweep": {"total_bandwidth": 2.0, "grid": 201,
                  "series": ["planner", "n1_rev", "n2", "ninf"]},
    },
}


def seed_figures(out_dir: str) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, scenario in _FIGURE_SCENARIOS.items():
        path = out / name
        path.write_text(json.dumps(scenario, indent=2) + "\n")
        written.append(str(path))
    return written


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectrum-market",
        description="Equilibrium and welfare computations for a two-tier "
                    "cellular market with unlicensed access.",
    )
    parser.add_argument(
        "--seed-figures", metavar="DIR",
        help="write the canonical figure scenario files to DIR and exit",
    )
    sub = parser.add_subparsers(dest="command")
    for name in ("associate", "monopoly", "nash", "planner", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        if name == "sweep":
            p.add_argument("--grid", type=int, default=None)
            p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.seed_figures:
        for path in seed_figures(args.seed_figures):
            print(path)
        return 0
    if not args.command:
        parser.print_help()
        return 0

    try:
        raw = load_scenario(args.scenario)
        params = scenario_params(raw)
        if args.command == "sweep":
            curve, series = cmd_sweep(raw, params, args.grid, args.jobs)
            if (args.format or "csv") == "csv":
                _emit(sweep_csv(curve, series), args.out)
            else:
                _emit(json.dumps(sweep_json(curve, series), indent=2) + "\n", args.out)
            return 0
        handler = {
            "associate": cmd_associate,
            "monopoly": cmd_monopoly,
            "nash": cmd_nash,
            "planner": cmd_planner,
        }[args.command]
        report = handler(raw, params)
        _emit(json.dumps(report, indent=2) + "\n", args.out)
        return 0
    except (ScenarioError, DomainError, MarketModelError) as exc:
        if isinstance(exc, SolverConsistencyError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
