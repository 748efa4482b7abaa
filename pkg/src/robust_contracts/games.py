"""Principal payoffs for Games I, II and III and the robust minimax counterpart.

Game I is the original game (contract first, type unknown), Game II reveals
the type before the contract is posted, and Game III is the first-best
benchmark where the principal pays after seeing output. All three aggregate
per-type payoffs with the worst-expectation operator of the ambiguity set.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .agent import affine_response, best_response, schedule_response, switch_slopes
from .model import (AffineContract, AffineFamily, AmbiguitySet, ConstantFamily, Contract,
                    GeneralFamily, LinearFamily, Scenario, ScheduleContract, Technology)


class IntractableError(ValueError):
    """Raised when exhaustive general-family search exceeds the configured cap."""


@dataclass(frozen=True)
class SolveResult:
    game: str
    value: float
    contract: Contract | None
    per_type_values: Mapping[str, float]
    worst_distribution: Mapping[str, float]
    per_type_contracts: Mapping[str, Contract] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


# --------------------------------------------------------------------------- #
# worst-expectation operator
# --------------------------------------------------------------------------- #


def worst_rows(ambiguity: AmbiguitySet, values: np.ndarray):
    """Worst expectation over the last axis (ordered as ``ambiguity.types``).

    Returns ``(value, member_index)`` arrays; ties go to the first member.
    """
    expect = values @ ambiguity.weights.T
    k = np.argmin(expect, axis=-1)
    return np.take_along_axis(expect, k[..., None], axis=-1)[..., 0], k


def worst_expectation(ambiguity: AmbiguitySet, per_type_values: Mapping[str, float]):
    """``min_G E_{t~G}[v_t]`` and the minimizing distribution."""
    missing = [t for t in ambiguity.types if t not in per_type_values]
    if missing:
        raise KeyError(f"no value for types {missing}")
    v = np.array([per_type_values[t] for t in ambiguity.types], dtype=float)
    value, k = worst_rows(ambiguity, v)
    return float(value), ambiguity.members[int(k)]


# --------------------------------------------------------------------------- #
# parameter grids for the restrictive families
# --------------------------------------------------------------------------- #


def theta_grids(scenario: Scenario, types=None):
    """``(theta0s, theta1s)`` searched for the scenario's parameterized family."""
    fam = scenario.family
    g = scenario.grid
    types = scenario.types if types is None else types
    if isinstance(fam, ConstantFamily):
        theta1s = np.zeros(1)
    else:
        theta1s = np.linspace(0.0, 1.0, g.theta1_steps)
        if g.breakpoints:
            extra = [switch_slopes(scenario.technologies[t]) for t in types]
            theta1s = np.unique(np.concatenate([theta1s, *extra]))
    if isinstance(fam, LinearFamily):
        theta0s = np.zeros(1)
    else:
        theta0s = np.linspace(0.0, scenario.theta0_max(), g.theta0_steps)
    return theta0s, theta1s


def _slope_table(scenario: Scenario, theta1s) -> np.ndarray:
    """Principal payoff before the offset, shape ``(len(theta1s), n_types)``."""
    eps = scenario.grid.eps_tie
    cols = [affine_response(scenario.technologies[t], theta1s, eps)[1] for t in scenario.types]
    return np.stack(cols, axis=1)


def _contract(fam, theta0, theta1) -> AffineContract:
    return AffineContract(float(theta0), float(theta1), fam.variant)


def _check_family(scenario: Scenario):
    if not isinstance(scenario.family, (AffineFamily, LinearFamily, ConstantFamily, GeneralFamily)):
        raise TypeError(f"unsupported contract family {scenario.family!r}")


# --------------------------------------------------------------------------- #
# Game I
# --------------------------------------------------------------------------- #


def solve_game_I(scenario: Scenario, extra_contracts=()) -> SolveResult:
    """Max over the family of the worst expected principal payoff.

    For the general family, ``extra_contracts`` (payment tables or affine
    contracts evaluated on the output grid) are searched alongside the
    level grid.
    """
    _check_family(scenario)
    if isinstance(scenario.family, GeneralFamily):
        return _game_I_general(scenario, extra_contracts)
    theta0s, theta1s = theta_grids(scenario)
    table = _slope_table(scenario, theta1s)                     # (N1, T)
    full = table[None, :, :] - theta0s[:, None, None]            # (N0, N1, T)
    worst, _ = worst_rows(scenario.ambiguity, full)
    i0, i1 = np.unravel_index(int(np.argmax(worst)), worst.shape)
    per_type = {t: float(full[i0, i1, j]) for j, t in enumerate(scenario.types)}
    value, dist = worst_expectation(scenario.ambiguity, per_type)
    return SolveResult("I", value, _contract(scenario.family, theta0s[i0], theta1s[i1]),
                       per_type, dist)


def _general_schedules(scenario: Scenario, extra_contracts) -> np.ndarray:
    fam: GeneralFamily = scenario.family
    g = scenario.grid
    if len(fam.output_grid) > g.general_max_outputs or fam.payment_steps > g.general_max_levels:
        raise IntractableError("general-family Game I intractable at this size "
                               f"({len(fam.output_grid)} outputs x {fam.payment_steps} levels; "
                               f"cap {g.general_max_outputs} x {g.general_max_levels})")
    levels = fam.payment_levels
    k = len(fam.output_grid)
    mesh = np.array(list(itertools.product(levels, repeat=k)), dtype=float).reshape(-1, k)
    extra = [np.asarray(c.pay(np.asarray(fam.output_grid)), dtype=float) for c in extra_contracts]
    if extra:
        if any(np.any(e < 0) for e in extra):
            raise ValueError("extra contracts must pay nonnegative amounts")
        mesh = np.vstack([mesh, np.array(extra)])
    return mesh


def _game_I_general(scenario: Scenario, extra_contracts) -> SolveResult:
    fam: GeneralFamily = scenario.family
    schedules = _general_schedules(scenario, extra_contracts)
    eps = scenario.grid.eps_tie
    cols = [schedule_response(scenario.technologies[t], fam.output_grid, schedules, eps)[1]
            for t in scenario.types]
    table = np.stack(cols, axis=1)
    worst, _ = worst_rows(scenario.ambiguity, table)
    i = int(np.argmax(worst))
    per_type = {t: float(table[i, j]) for j, t in enumerate(scenario.types)}
    value, dist = worst_expectation(scenario.ambiguity, per_type)
    return SolveResult("I", value, ScheduleContract(fam.output_grid, tuple(schedules[i])),
                       per_type, dist)


# --------------------------------------------------------------------------- #
# Game II
# --------------------------------------------------------------------------- #


def cheapest_cost_schedule(technology: Technology, eps_tie: float = 1e-9) -> ScheduleContract:
    """Pay, at each producible output, the least cost of an action producing it."""
    table: dict[float, float] = {}
    for a in technology.actions:
        for y in a.output.values:
            key = next((k for k in table if abs(k - y) <= eps_tie), None)
            if key is None:
                table[y] = a.cost
            else:
                table[key] = min(table[key], a.cost)
    ys = sorted(table)
    return ScheduleContract(tuple(ys), tuple(table[y] for y in ys))


def game_II_general(technology: Technology, eps_tie: float = 1e-9) -> float:
    """Type-known value of the general family: the first-best surplus.

    The cheapest-cost schedule leaves the agent indifferent at zero between
    the cheapest producers of each output, so favorable tie-breaking selects
    the surplus-maximizing action. The construction is re-checked with
    :func:`best_response`; with random outputs it can fail, in which case a
    warning is issued and the first-best bound is still returned.
    """
    value, _ = technology.first_best()
    schedule = cheapest_cost_schedule(technology, eps_tie)
    br = best_response(schedule, technology, eps_tie)
    if br.principal_payoff < value - 1e-9 * max(1.0, abs(value)):
        warnings.warn(f"type {technology.type_id}: cheapest-cost schedule is not incentive "
                      f"compatible (attains {br.principal_payoff:.6g} < {value:.6g}); "
                      "reporting the first-best value", RuntimeWarning, stacklevel=2)
    return value


def per_type_game_II(scenario: Scenario, type_id: str):
    """Best principal payoff and contract when ``type_id`` is known."""
    fam = scenario.family
    tech = scenario.technologies[type_id]
    if isinstance(fam, GeneralFamily):
        return game_II_general(tech, scenario.grid.eps_tie), cheapest_cost_schedule(tech)
    theta0s, theta1s = theta_grids(scenario)
    _, pay = affine_response(tech, theta1s, scenario.grid.eps_tie)
    i1 = int(np.argmax(pay))
    return float(pay[i1] - theta0s[0]), _contract(fam, theta0s[0], theta1s[i1])


def solve_game_II(scenario: Scenario) -> SolveResult:
    """Worst expectation of the per-type optimal payoffs."""
    _check_family(scenario)
    per_type, contracts = {}, {}
    for t in scenario.types:
        per_type[t], contracts[t] = per_type_game_II(scenario, t)
    value, dist = worst_expectation(scenario.ambiguity, per_type)
    return SolveResult("II", value, None, per_type, dist, contracts)


# --------------------------------------------------------------------------- #
# Game III
# --------------------------------------------------------------------------- #


def solve_game_III(scenario: Scenario) -> SolveResult:
    """Worst expectation of each type's first-best surplus.

    Any surjective family reaches every payment after output is seen, so the
    value does not depend on the family.
    """
    _check_family(scenario)
    notes = ()
    if not scenario.family.surjective:
        msg = (f"{scenario.family.variant} family is not surjective in general; "
               "Game III value is the surjective-family benchmark")
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes = (msg,)
    per_type = {t: scenario.technologies[t].first_best()[0] for t in scenario.types}
    value, dist = worst_expectation(scenario.ambiguity, per_type)
    return SolveResult("III", value, None, per_type, dist, warnings=notes)


# --------------------------------------------------------------------------- #
# minimax counterpart
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class MinimaxResult:
    maximin: float
    minimax: float
    maximin_contract: Contract
    minimax_type: str

    @property
    def gap(self) -> float:
        return self.minimax - self.maximin


def minimax_counterpart(scenario: Scenario) -> MinimaxResult:
    """Robust maximin value and its order-swapped counterpart.

    The gap is the information rent of the robust problem; weak duality
    makes it nonnegative.
    """
    if not isinstance(scenario.family, (AffineFamily, LinearFamily)):
        raise ValueError("minimax counterpart needs an affine or linear family")
    if not scenario.ambiguity.is_robust:
        raise ValueError(f"minimax counterpart is defined for all_deltas/full_simplex ambiguity, "
                         f"not {scenario.ambiguity.variant!r}")
    maximin = solve_game_I(scenario)
    per_type = {t: per_type_game_II(scenario, t)[0] for t in scenario.types}
    t_star = min(scenario.types, key=lambda t: per_type[t])
    return MinimaxResult(maximin.value, per_type[t_star], maximin.contract, t_star)


def grid_slack(scenario: Scenario) -> float:
    """Payoff change across one parameter-grid cell."""
    g = scenario.grid
    top = max(float(scenario.technologies[t].means.max()) for t in scenario.types)
    slack = top / (g.theta1_steps - 1)
    if not isinstance(scenario.family, LinearFamily):
        slack += scenario.theta0_max() / (g.theta0_steps - 1)
    return slack
