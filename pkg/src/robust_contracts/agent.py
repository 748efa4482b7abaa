"""The agent's problem: best responses to a posted contract."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SurplusCurve, extremal_point, upper_hull
from .model import Action, AffineContract, Contract, ProductionCurve, Technology

# rows x actions evaluated per block in the vectorized response tables
_BLOCK = 1 << 21


@dataclass(frozen=True)
class BestResponse:
    action: Action
    index: int
    agent_payoff: float
    principal_payoff: float


def expected_wage(contract: Contract, action: Action) -> float:
    out = action.output
    if out.is_deterministic:
        return float(contract.pay(out.values[0]))
    pays = np.asarray(contract.pay(np.asarray(out.values)), dtype=float)
    return math.fsum(p * w for p, w in zip(out.probs, pays))


def choose(agent: np.ndarray, principal: np.ndarray, order: np.ndarray, eps_tie: float) -> np.ndarray:
    """Row-wise favorable-tie-breaking argmax.

    Among columns whose agent payoff is within ``eps_tie`` of the row maximum,
    pick the largest principal payoff; exact ties fall to the earliest column
    in ``order`` (lowest cost, then input order).
    """
    a = agent[:, order]
    p = principal[:, order]
    top = a.max(axis=1, keepdims=True)
    score = np.where(a >= top - eps_tie, p, -np.inf)
    return order[np.argmax(score, axis=1)]


def best_response(contract: Contract, technology: Technology, eps_tie: float = 1e-9) -> BestResponse:
    wages = np.array([expected_wage(contract, a) for a in technology.actions])
    agent = wages - technology.costs
    principal = technology.means - wages
    k = int(choose(agent[None], principal[None], technology.response_order, eps_tie)[0])
    return BestResponse(technology.actions[k], k, float(agent[k]), float(principal[k]))


def affine_response(technology: Technology, theta1s, eps_tie: float = 1e-9):
    """Best responses to ``theta1 * y`` for every slope in ``theta1s``.

    A constant offset shifts every action's agent payoff (outside option
    included) by the same amount, so the choice depends on the slope only.
    Returns ``(indices, principal_payoffs)``; subtract the offset from the
    latter for an affine contract.
    """
    th = np.asarray(theta1s, dtype=float)
    m, c = technology.means, technology.costs
    idx = np.empty(th.shape, dtype=int)
    rows = max(1, _BLOCK // max(1, len(m)))
    for lo in range(0, len(th), rows):
        t = th[lo:lo + rows, None]
        idx[lo:lo + rows] = choose(t * m - c, (1.0 - t) * m, technology.response_order, eps_tie)
    return idx, (1.0 - th) * m[idx]


def schedule_response(technology: Technology, grid, schedules: np.ndarray, eps_tie: float = 1e-9):
    """Best responses to many payment tables over the same output ``grid``.

    ``schedules`` has one row of payments per contract. Returns
    ``(indices, principal_payoffs)``.
    """
    grid = np.asarray(grid, dtype=float)
    q = np.zeros((len(technology.actions), len(grid)))
    for i, a in enumerate(technology.actions):
        for y, p in zip(a.output.values, a.output.probs):
            j = int(np.abs(grid - y).argmin())
            if abs(grid[j] - y) > 1e-9:
                raise ValueError(f"output {y!r} is off the contract grid")
            q[i, j] += p
    m, c = technology.means, technology.costs
    n = len(schedules)
    idx = np.empty(n, dtype=int)
    pay = np.empty(n)
    rows = max(1, _BLOCK // max(1, len(m)))
    for lo in range(0, n, rows):
        w = schedules[lo:lo + rows] @ q.T
        k = choose(w - c, m - w, technology.response_order, eps_tie)
        idx[lo:lo + rows] = k
        pay[lo:lo + rows] = m[k] - w[np.arange(len(k)), k]
    return idx, pay


def switch_slopes(technology: Technology) -> np.ndarray:
    """Contract slopes in (0, 1] at which the agent's best response changes.

    Under ``theta1 * y`` the agent maximizes ``theta1 * E[y] - c``, so its
    choices trace the lower convex hull of the ``(E[y], c)`` points; the
    switches happen at that hull's edge slopes.
    """
    m, c = technology.means, technology.costs
    hull = upper_hull(m, -c)
    dm = np.diff(m[hull])
    dc = np.diff(c[hull])
    slopes = dc[dm > 0] / dm[dm > 0]
    return np.unique(slopes[(slopes > 0) & (slopes <= 1)])


def extremal_response_affine(curve: ProductionCurve, theta0: float, theta1: float) -> tuple[float, float]:
    """The agent's choice under ``theta0 + theta1 * y`` as a ``(cost, surplus)`` point.

    The agent's payoff is ``theta1 * s + (theta1 - 1) * c + theta0``, so it
    picks the extremal sample in direction ``(theta1 - 1, theta1)``; the
    offset ``theta0`` plays no role.
    """
    if not 0.0 <= theta1 <= 1.0:
        raise ValueError("theta1 must lie in [0, 1]")
    return extremal_point(SurplusCurve.from_production(curve), (theta1 - 1.0, theta1))


def affine_payoffs(contract: AffineContract, technology: Technology, eps_tie: float = 1e-9):
    """(agent, principal) payoffs for one affine contract through the vectorized path."""
    idx, principal = affine_response(technology, [contract.theta1], eps_tie)
    k = int(idx[0])
    agent = contract.theta0 + contract.theta1 * technology.means[k] - technology.costs[k]
    return float(agent), float(principal[0] - contract.theta0)
