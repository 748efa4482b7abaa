"""Closed-form checks, affine-optimality certificates and gap decomposition."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .agent import affine_response, best_response, switch_slopes
from .games import (grid_slack, solve_game_I, solve_game_II, solve_game_III)
from .geometry import (SurplusCurve, sampled_derivative, concave_envelope, inverse_derivative)
from .model import (AffineFamily, GapReport, LinearFamily, ProductionCurve, Scenario,
                    Technology, TypeSummary, production_curve)


class CertificationError(RuntimeError):
    """A certified scenario failed its numerical cross-check."""


class ChainViolation(RuntimeError):
    """Solver values broke the z_I <= z_II <= z_III ordering."""


def _curve(obj) -> ProductionCurve:
    return production_curve(obj) if isinstance(obj, Technology) else obj


# --------------------------------------------------------------------------- #
# surplus classification
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SurplusClass:
    classification: str                      # "convex", "concave" or "neither"
    is_convex: bool
    is_concave: bool
    witnesses: Mapping[str, tuple[int, ...]] = field(default_factory=dict)


def classify_surplus(curve, eps: float = 1e-6, *, require_origin: bool = True) -> SurplusClass:
    """Convex/concave surplus test on secant slopes of ``g``.

    Both shapes need every slope >= 1 and ``g(0) = 0``; convex additionally
    needs nondecreasing slopes, concave nonincreasing ones. A linear ``g``
    passes both and is labelled convex.
    """
    curve = _curve(curve)
    c, g = curve.costs, curve.outputs
    wit: dict[str, tuple[int, ...]] = {}
    if require_origin and (c[0] != 0 or abs(g[0]) > eps):
        wit["origin"] = (0,)
    if len(c) >= 2:
        d = np.diff(g) / np.diff(c)
        tol = eps * np.maximum(1.0, np.abs(d))
        low = np.flatnonzero(d < 1 - tol)
        if low.size:
            wit["slope_below_one"] = tuple(int(i) for i in low)
        dd = np.diff(d)
        tol2 = eps * np.maximum(1.0, np.maximum(np.abs(d[:-1]), np.abs(d[1:])))
        down = np.flatnonzero(dd < -tol2)
        up = np.flatnonzero(dd > tol2)
        if down.size:
            wit["not_convex"] = tuple(int(i) for i in down)
        if up.size:
            wit["not_concave"] = tuple(int(i) for i in up)
    base = "origin" not in wit and "slope_below_one" not in wit
    convex = base and "not_convex" not in wit
    concave = base and "not_concave" not in wit
    label = "convex" if convex else "concave" if concave else "neither"
    return SurplusClass(label, convex, concave, wit)


# --------------------------------------------------------------------------- #
# convex surplus
# --------------------------------------------------------------------------- #


def endpoint_stats(curves: Mapping[str, object]) -> dict[str, tuple[float, float]]:
    """Per type ``(g(c_bar), g(c_bar) / c_bar)``."""
    out = {}
    for t, obj in curves.items():
        cv = _curve(obj)
        out[t] = (float(cv.outputs[-1]), float(cv.outputs[-1] / cv.cost_cap))
    return out


def bottleneck_type(curves: Mapping[str, object], eps: float = 1e-6) -> str | None:
    """A type that is both least productive and least efficient at full effort."""
    stats = endpoint_stats(curves)
    if not stats:
        return None
    lvl = min(v[0] for v in stats.values())
    rat = min(v[1] for v in stats.values())
    for t, (level, ratio) in stats.items():
        if level <= lvl + eps and ratio <= rat + eps:
            return t
    return None


def convex_closed_forms(curve) -> tuple[float, float]:
    """Optimal slope ``c_bar / g(c_bar)`` and type-known value ``g(c_bar) - c_bar``."""
    curve = _curve(curve)
    cls = classify_surplus(curve)
    if not cls.is_convex:
        raise ValueError(f"closed forms need a convex surplus curve, got {cls.classification}")
    gbar, cbar = float(curve.outputs[-1]), curve.cost_cap
    return cbar / gbar, gbar - cbar


@dataclass(frozen=True)
class Certificate:
    certified: bool
    bottleneck_type: str | None
    reason: str
    evidence: Mapping[str, dict] = field(default_factory=dict)
    measured_gap: float | None = None


def certify_affine_optimal(scenario: Scenario, *, measure: bool = True) -> Certificate:
    """Sufficient condition for a zero optimality gap of the affine/linear family.

    Certified when every type has convex surplus and a bottleneck type exists
    in a purely robust problem. A certificate is always cross-checked against
    the solvers; ``measure`` also reports the solver gap when not certified.
    """
    fam, amb = scenario.family, scenario.ambiguity
    if not isinstance(fam, (AffineFamily, LinearFamily)):
        return Certificate(False, None, f"condition out of scope: {fam.variant} family")
    if not amb.is_robust:
        return Certificate(False, None, f"condition out of scope: {amb.variant} ambiguity")
    curves = {t: production_curve(scenario.technologies[t]) for t in scenario.types}
    eps = scenario.grid.eps_val
    classes = {t: classify_surplus(curves[t], eps) for t in scenario.types}
    stats = endpoint_stats(curves)
    evidence = {t: {"g_bar": stats[t][0], "ratio": stats[t][1],
                    "surplus": classes[t].classification} for t in scenario.types}
    star = bottleneck_type(curves, eps)

    non_convex = [t for t in scenario.types if not classes[t].is_convex]
    if non_convex:
        certified, reason = False, f"surplus not convex for types {non_convex}"
    elif star is None:
        certified, reason = False, "no type is both least productive and least efficient"
    else:
        certified, reason = True, f"convex surplus for all types; bottleneck type {star}"

    gap = None
    if certified or measure:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            gap = solve_game_III(scenario).value - solve_game_I(scenario).value
        tol = eps if scenario.grid.breakpoints else eps + grid_slack(scenario)
        if certified and gap > tol:
            raise CertificationError(f"certified scenario has measured gap {gap:.3g} > {tol:.3g}")
    return Certificate(certified, star, reason, evidence, gap)


# --------------------------------------------------------------------------- #
# concave surplus
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class AdjustabilityRatio:
    value: float
    numerator: float
    denominator: float
    is_lower_bound: bool

    def __float__(self):
        return self.value


def adjustability_ratio_concave(curve, *, require_origin: bool = True,
                                slope_tol: float = 1e-3) -> AdjustabilityRatio:
    """Affine Game II value over first-best for a concave-surplus curve.

    Numerator ``max_c g - g/g'`` and denominator ``max_c g - c`` are grid
    scans. When the surplus is still rising at the cost cap the ratio is only
    a lower bound and is flagged as such.
    """
    curve = _curve(curve)
    cls = classify_surplus(curve, require_origin=require_origin)
    if not cls.is_concave:
        raise ValueError(f"adjustability ratio needs a concave surplus curve, got {cls.classification}")
    g, c = curve.outputs, curve.costs
    denom = float(np.max(g - c))
    if denom <= 0:
        raise ValueError("no positive surplus: the technology violates non-triviality (Assumption 5)")
    dg = sampled_derivative(curve)
    with np.errstate(divide="ignore", invalid="ignore"):
        num_vals = np.where(dg > 0, g - g / dg, -np.inf)
    numer = float(np.max(num_vals))
    rising = dg[-1] > 1 + slope_tol and int(np.argmax(g - c)) == len(c) - 1
    return AdjustabilityRatio(numer / denom, numer, denom, bool(rising))


def affine_payoff_concave(curve, theta0: float, theta1: float) -> float:
    """Principal payoff ``(1 - theta1) g((g')^{-1}(1/theta1)) - theta0``.

    Only the derivative shape is required; a vertical offset in ``g`` (as in
    the forest case) is allowed.
    """
    curve = _curve(curve)
    if not 0 < theta1 <= 1:
        raise ValueError("theta1 must lie in (0, 1]")
    cls = classify_surplus(curve, require_origin=False)
    if not cls.is_concave:
        raise ValueError(f"payoff formula needs a concave surplus curve, got {cls.classification}")
    c = inverse_derivative(curve, 1.0 / theta1)
    return float((1 - theta1) * curve(c) - theta0)


# --------------------------------------------------------------------------- #
# gap decomposition
# --------------------------------------------------------------------------- #


def _envelope_bound(tech: Technology) -> dict:
    if not tech.is_deterministic:
        tech = tech.mean_reduced()
    curve = production_curve(tech)
    cls = classify_surplus(curve)
    out = {"surplus": cls.classification}
    if cls.is_convex:
        out["adjustability_ratio"] = 1.0
        return out
    try:
        if cls.is_concave:
            r = adjustability_ratio_concave(curve)
            out.update(adjustability_ratio=r.value, is_lower_bound=r.is_lower_bound)
        else:
            env = concave_envelope(SurplusCurve.from_production(curve)).to_production()
            r = adjustability_ratio_concave(env)
            out.update(adjustability_ratio=r.value, is_lower_bound=True, from_envelope=True)
    except ValueError as exc:
        out["note"] = str(exc)
    return out


def decompose_gap(scenario: Scenario) -> GapReport:
    """Games I-III, the adjustability gap and the information rent."""
    caught = []
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        r1 = solve_game_I(scenario)
        r2 = solve_game_II(scenario)
        r3 = solve_game_III(scenario)
        caught = tuple(dict.fromkeys(str(w.message) for w in rec))
    tol = scenario.grid.eps_val + (0.0 if scenario.grid.breakpoints else grid_slack(scenario))
    if r1.value > r2.value + tol or r2.value > r3.value + tol:
        raise ChainViolation(f"z_I={r1.value!r}, z_II={r2.value!r}, z_III={r3.value!r}")
    per_type = {}
    bounds = {}
    for t in scenario.types:
        tech = scenario.technologies[t]
        br = best_response(r1.contract, tech, scenario.grid.eps_tie)
        per_type[t] = TypeSummary(r3.per_type_values[t], r2.per_type_values[t], br.action)
        bounds[t] = _envelope_bound(tech)
    return GapReport(r1.value, r2.value, r3.value, r1.contract, per_type,
                     scenario.grid.eps_val, bounds, caught)


# --------------------------------------------------------------------------- #
# quasi-concavity diagnostics
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class QuasiConcavityReport:
    quasi_concave: bool
    thetas: np.ndarray
    payoffs: np.ndarray
    dips: tuple[float, ...] = ()


def _upper_sets_are_intervals(v: np.ndarray, eps: float) -> np.ndarray:
    left = np.maximum.accumulate(v)
    right = np.maximum.accumulate(v[::-1])[::-1]
    return np.flatnonzero(v < np.minimum(left, right) - eps)


def quasiconcavity_scan(scenario: Scenario, mode: str = "curve") -> dict[str, QuasiConcavityReport]:
    """Per type, whether ``theta1 -> principal payoff`` has interval upper-level sets.

    ``mode="discrete"`` checks the payoff on the ``theta1`` grid literally.
    Between consecutive action switches that payoff falls linearly and jumps
    up at the next switch, so a finite action set sampled from a smooth curve
    shows a sawtooth. ``mode="curve"`` reads the technology as samples of a
    continuous curve and checks the payoff at the switch points (the peaks of
    the sawtooth) plus both ends of ``[0, 1]``.
    """
    if not isinstance(scenario.family, (AffineFamily, LinearFamily)):
        raise ValueError("quasi-concavity scan needs an affine or linear family")
    if mode not in ("curve", "discrete"):
        raise ValueError(f"unknown scan mode {mode!r}")
    eps_tie, eps = scenario.grid.eps_tie, scenario.grid.eps_val
    out = {}
    for t in scenario.types:
        tech = scenario.technologies[t]
        if mode == "curve":
            th = np.unique(np.concatenate([[0.0, 1.0], switch_slopes(tech)]))
        else:
            th = np.unique(np.concatenate([np.linspace(0, 1, scenario.grid.theta1_steps),
                                           switch_slopes(tech)]))
        _, pay = affine_response(tech, th, eps_tie)
        dips = _upper_sets_are_intervals(pay, eps)
        out[t] = QuasiConcavityReport(dips.size == 0, th, pay, tuple(float(th[i]) for i in dips))
    return out
