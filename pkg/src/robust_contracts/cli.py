"""Command-line entry point: ``robust-contracts <command> [scenario] [flags]``."""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .cases import (ForestParams, SalesforceParams, forest_linear_payoff, forest_ratio_bound,
                    forest_ratio_sweep, salesforce_curve, salesforce_optimal_slope,
                    salesforce_scenario)
from .certification import (adjustability_ratio_concave, certify_affine_optimal,
                            classify_surplus, convex_closed_forms, decompose_gap)
from .games import minimax_counterpart, solve_game_I, solve_game_II, solve_game_III
from .geometry import SurplusCurve, concave_envelope, upper_hull
from .model import GridConfig, production_curve
from .scenario_io import (ScenarioError, action_to_dict, contract_to_dict, dumps, load_scenario,
                          report_document)
from .validation import validate

SCENARIO_COMMANDS = ("solve-i", "solve-ii", "solve-iii", "gaps", "certify", "envelope", "minimax")
COMMANDS = SCENARIO_COMMANDS + ("case-forest", "case-salesforce", "validate")


def _solve_payload(res) -> dict:
    return {"game": res.game, "value": res.value, "contract": contract_to_dict(res.contract),
            "per_type_values": dict(res.per_type_values),
            "worst_distribution": dict(res.worst_distribution),
            "per_type_contracts": {t: contract_to_dict(c) for t, c in res.per_type_contracts.items()},
            "warnings": list(res.warnings)}


def _gaps_payload(rep) -> dict:
    return {
        "z_I": rep.z_I, "z_II": rep.z_II, "z_III": rep.z_III,
        "adjustability_gap": rep.adjustability_gap,
        "information_rent": rep.information_rent,
        "optimality_gap_bound": rep.optimality_gap_bound,
        "best_contract": contract_to_dict(rep.best_contract),
        "per_type": {t: {"first_best": s.first_best, "game_II_value": s.game_II_value,
                         "agent_action": action_to_dict(s.agent_action)}
                     for t, s in rep.per_type.items()},
        "envelope_bounds": dict(rep.envelope_bounds),
        "eps_val": rep.eps_val,
        "warnings": list(rep.warnings),
    }


def _envelope_payload(scenario) -> dict:
    out = {}
    for t in scenario.types:
        tech = scenario.technologies[t]
        curve = production_curve(tech if tech.is_deterministic else tech.mean_reduced())
        surplus = SurplusCurve.from_production(curve)
        env = concave_envelope(surplus)
        hull = upper_hull(surplus.costs, surplus.surplus)
        cls = classify_surplus(curve)
        entry = {"surplus": cls.classification,
                 "hull_vertices": [[float(surplus.costs[i]), float(surplus.surplus[i])] for i in hull],
                 "max_envelope_excess": float(np.max(env.surplus - surplus.surplus))}
        try:
            if cls.is_convex:
                th, val = convex_closed_forms(curve)
                entry.update(theta1_star=th, game_II_value=val)
            elif cls.is_concave:
                r = adjustability_ratio_concave(curve)
                entry.update(adjustability_ratio=r.value, is_lower_bound=r.is_lower_bound)
        except ValueError as exc:
            entry["note"] = str(exc)
        out[t] = entry
    return {"envelope": out}


def _run_scenario_command(command: str, scenario) -> dict:
    if command == "solve-i":
        return _solve_payload(solve_game_I(scenario))
    if command == "solve-ii":
        return _solve_payload(solve_game_II(scenario))
    if command == "solve-iii":
        return _solve_payload(solve_game_III(scenario))
    if command == "gaps":
        return _gaps_payload(decompose_gap(scenario))
    if command == "certify":
        c = certify_affine_optimal(scenario)
        return {"certified": c.certified, "bottleneck_type": c.bottleneck_type,
                "reason": c.reason, "evidence": c.evidence, "measured_gap": c.measured_gap}
    if command == "envelope":
        return _envelope_payload(scenario)
    if command == "minimax":
        m = minimax_counterpart(scenario)
        return {"maximin": m.maximin, "minimax": m.minimax, "gap": m.gap,
                "maximin_contract": contract_to_dict(m.maximin_contract),
                "minimax_type": m.minimax_type}
    raise ValueError(f"unknown command {command!r}")


def _forest(args) -> dict:
    params = ForestParams(args.k, args.h, args.t, args.a0)
    r = forest_ratio_bound(params)
    payload = {"params": {"k": args.k, "h": args.h, "t": args.t, "a0": args.a0},
               "p": args.p, "payoff": forest_linear_payoff(params, args.p),
               "payoff_at_half": r.payoff_at_half,
               "surplus_upper_bound": r.surplus_upper_bound, "ratio": r.ratio}
    if args.sweep:
        ts = np.linspace(0.0, 1.0, args.sweep)
        payload["sweep"] = [{"t": x.t, "ratio": x.ratio} for x in forest_ratio_sweep(params, ts)]
    return payload


def _salesforce(args) -> dict:
    params = SalesforceParams(args.cost_low, args.cost_high, args.effort_low, args.effort_high,
                              tuple(args.outputs), args.abar, tuple(args.deltas or ()), args.q)
    slope = salesforce_optimal_slope(params)
    curve = salesforce_curve(params, worst=True)
    cert = certify_affine_optimal(salesforce_scenario(params))
    return {"slope": slope,
            "curve_slope": float(curve.cost_cap / curve.outputs[-1]),
            "implementable": slope <= 1.0,
            "certified": cert.certified, "bottleneck_type": cert.bottleneck_type,
            "reason": cert.reason, "measured_gap": cert.measured_gap}


def _validate(args) -> tuple[dict, bool]:
    results = validate(args.count, args.seed)
    passed = sum(r.passed for r in results)
    doc = {"count": args.count, "passed": passed,
           "instances": [{"index": r.index, "seed": list(r.seed), "passed": r.passed,
                          "values": r.values, "failures": list(r.failures)} for r in results]}
    return doc, passed == len(results)


def _grid_overrides(args) -> dict:
    return {name: getattr(args, f"grid_{name}") for name in
            ("theta1_steps", "theta0_steps", "theta0_max", "cost_steps", "eps_tie", "eps_val")}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-contracts",
                                     description="Robust principal-agent contract solver")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def common(p):
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        g = p.add_argument_group("grid overrides")
        g.add_argument("--grid-theta1-steps", dest="grid_theta1_steps", type=int)
        g.add_argument("--grid-theta0-steps", dest="grid_theta0_steps", type=int)
        g.add_argument("--grid-theta0-max", dest="grid_theta0_max", type=float)
        g.add_argument("--grid-cost-steps", dest="grid_cost_steps", type=int)
        g.add_argument("--grid-eps-tie", dest="grid_eps_tie", type=float)
        g.add_argument("--grid-eps-val", dest="grid_eps_val", type=float)

    for name in SCENARIO_COMMANDS:
        p = sub.add_parser(name, help=f"{name} on a scenario document")
        p.add_argument("scenario", type=Path)
        common(p)

    p = sub.add_parser("case-forest", help="forest conservation closed forms")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--a0", type=float, default=0.0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--sweep", type=int, default=0, metavar="N",
                   help="also report the ratio at N evenly spaced t in [0, 1]")
    common(p)

    p = sub.add_parser("case-salesforce", help="salesforce optimal slope and certificate")
    p.add_argument("--cost-low", type=float, required=True)
    p.add_argument("--cost-high", type=float, required=True)
    p.add_argument("--effort-low", type=float, required=True)
    p.add_argument("--effort-high", type=float, required=True)
    p.add_argument("--outputs", type=float, nargs="+", required=True, help="y_0 y_1 ... y_n")
    p.add_argument("--abar", type=float, required=True)
    p.add_argument("--deltas", type=float, nargs="*")
    p.add_argument("--q", type=float, default=2.0)
    common(p)

    p = sub.add_parser("validate", help="randomized ordering checks")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    common(p)
    return parser


def run(args) -> tuple[dict, bool]:
    """Dispatch a parsed command; returns the report and whether it passed."""
    overrides = _grid_overrides(args)
    if args.command in SCENARIO_COMMANDS:
        scenario = load_scenario(args.scenario, overrides)
        payload = _run_scenario_command(args.command, scenario)
        return report_document(args.command, payload, scenario.grid), True
    grid = GridConfig(**{k: v for k, v in overrides.items() if v is not None})
    if args.command == "case-forest":
        return report_document(args.command, _forest(args), grid), True
    if args.command == "case-salesforce":
        return report_document(args.command, _salesforce(args), grid), True
    if args.command == "validate":
        payload, ok = _validate(args)
        return report_document(args.command, payload, grid, seed=args.seed), ok
    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            doc, ok = run(args)
    except (ScenarioError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dumps(doc)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
