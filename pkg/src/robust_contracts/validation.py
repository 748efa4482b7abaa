"""Randomized regression gate: payoff ordering across games and families."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .certification import decompose_gap
from .games import grid_slack, solve_game_I, solve_game_II, solve_game_III
from .generators import general_counterpart, random_scenario
from .model import Scenario


@dataclass(frozen=True)
class InstanceCheck:
    index: int
    seed: tuple[int, int]
    passed: bool
    values: dict
    failures: tuple[str, ...] = field(default=())


def check_scenario(scenario: Scenario, payment_steps: int = 5) -> tuple[dict, list[str]]:
    """Evaluate ``z_I <= z_II <= z_III``, ``z_I(affine) <= z_I(general)`` and the gap identities."""
    tol = scenario.grid.eps_val + grid_slack(scenario)
    failures = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        r1 = solve_game_I(scenario)
        z2 = solve_game_II(scenario).value
        z3 = solve_game_III(scenario).value
        general = general_counterpart(scenario, payment_steps)
        z1_gen = solve_game_I(general, extra_contracts=[r1.contract]).value
        report = decompose_gap(scenario)
    z1 = r1.value
    if z1 > z2 + tol:
        failures.append(f"z_I {z1!r} > z_II {z2!r}")
    if z2 > z3 + tol:
        failures.append(f"z_II {z2!r} > z_III {z3!r}")
    if z1 > z1_gen + tol:
        failures.append(f"z_I(affine) {z1!r} > z_I(general) {z1_gen!r}")
    if (report.z_I, report.z_II, report.z_III) != (z1, z2, z3):
        failures.append("gap report disagrees with the solvers")
    ident = report.adjustability_gap + report.information_rent - report.optimality_gap_bound
    if abs(ident) > 1e-12 * max(1.0, abs(z3)):
        failures.append(f"gap identity off by {ident!r}")
    values = {"z_I": z1, "z_II": z2, "z_III": z3, "z_I_general": z1_gen, "tolerance": tol}
    return values, failures


def validate(count: int, seed: int) -> list[InstanceCheck]:
    out = []
    for i in range(count):
        s = (int(seed), i)
        values, failures = check_scenario(random_scenario(s))
        out.append(InstanceCheck(i, s, not failures, values, tuple(failures)))
    return out
