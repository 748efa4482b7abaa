"""Seeded random scenarios and curves for property checks.

Every generator takes a seed (an int or a tuple of ints) and is a pure
function of it.
"""

from __future__ import annotations

import numpy as np

from .certification import bottleneck_type
from .model import (Action, AffineFamily, AmbiguitySet, GeneralFamily, GridConfig, OutputSpec,
                    ProductionCurve, Scenario, Technology, validate_scenario)

MAX_TYPES = 4
MAX_ACTIONS = 8
MAX_LEVELS = 5


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _probs(rng, n: int) -> list[float]:
    w = np.round(rng.dirichlet(np.ones(n)), 3)
    w = np.maximum(w, 0.001)
    w[-1] = 0.0
    w[-1] = 1.0 - w.sum()
    if w[-1] <= 0:
        return [1.0 / n] * n
    return [float(x) for x in w]


def _random_technology(rng, type_id: str, n_actions: int, levels: np.ndarray,
                       random_outputs: bool) -> Technology:
    # redraw until some action beats the outside option (non-triviality)
    while True:
        acts = [Action.deterministic(0.0, 0.0)]
        for _ in range(n_actions - 1):
            cost = float(np.round(rng.uniform(0.05, 3.0), 3))
            if random_outputs and rng.random() < 0.5:
                k = int(rng.integers(2, min(3, len(levels)) + 1))
                ys = np.sort(rng.choice(levels, size=k, replace=False))
                out = OutputSpec.distribution(zip(ys.tolist(), _probs(rng, k)))
            else:
                out = OutputSpec.deterministic(float(rng.choice(levels)))
            acts.append(Action(cost, out))
        tech = Technology(type_id, tuple(acts))
        if np.any(tech.means - tech.costs > 0):
            return tech


def _random_ambiguity(rng, types: list[str]) -> AmbiguitySet:
    variant = rng.choice(["singleton", "all_deltas", "finite", "full_simplex"])
    if variant == "all_deltas":
        return AmbiguitySet.all_deltas(types)
    if variant == "full_simplex":
        return AmbiguitySet.full_simplex(types)
    if variant == "singleton":
        return AmbiguitySet.singleton(dict(zip(types, _probs(rng, len(types)))))
    n = int(rng.integers(2, 4))
    return AmbiguitySet.finite([dict(zip(types, _probs(rng, len(types)))) for _ in range(n)])


def random_scenario(seed, n_types: int | None = None, n_actions: int | None = None, *,
                    random_outputs: bool = True, family: str = "affine",
                    payment_steps: int = 5, grid: GridConfig | None = None) -> Scenario:
    """Random finite-action scenario on a shared output grid of at most five levels.

    Each type has the outside option plus up to ``n_actions - 1`` priced
    actions with deterministic or two/three-point outputs. ``family`` is
    ``"affine"`` or ``"general"`` (payments on the shared output grid).
    """
    if n_types is not None and not 1 <= n_types <= MAX_TYPES:
        raise ValueError(f"n_types must lie in [1, {MAX_TYPES}]")
    if n_actions is not None and not 2 <= n_actions <= MAX_ACTIONS:
        raise ValueError(f"n_actions must lie in [2, {MAX_ACTIONS}]")
    rng = _rng(seed)
    T = n_types or int(rng.integers(1, MAX_TYPES + 1))
    n_pos = int(rng.integers(2, MAX_LEVELS))
    levels = np.concatenate([[0.0], np.sort(np.round(rng.uniform(0.2, 5.0, n_pos), 2))])
    levels = np.unique(levels)
    techs = {}
    for j in range(T):
        A = n_actions or int(rng.integers(2, MAX_ACTIONS + 1))
        tid = f"T{j}"
        techs[tid] = _random_technology(rng, tid, A, levels, random_outputs)
    amb = _random_ambiguity(rng, list(techs))
    if family == "affine":
        fam = AffineFamily()
    elif family == "general":
        fam = GeneralFamily(tuple(levels.tolist()), float(levels.max()), payment_steps)
    else:
        raise ValueError(f"unknown family {family!r}")
    scen = Scenario(techs, amb, fam, grid or GridConfig(theta1_steps=401, theta0_steps=21))
    assert not validate_scenario(scen)
    return scen


def general_counterpart(scenario: Scenario, payment_steps: int = 5) -> Scenario:
    """Same scenario under the general family on its pooled output grid."""
    ys = sorted({y for t in scenario.types for a in scenario.technologies[t].actions
                 for y in a.output.values})
    return scenario.with_family(GeneralFamily(tuple(ys), float(max(ys)), payment_steps))


# --------------------------------------------------------------------------- #
# curves
# --------------------------------------------------------------------------- #


def random_convex_curve(seed, steps: int = 41) -> ProductionCurve:
    """``g(c) = s c + a c^p`` with ``s >= 1``, ``p >= 1`` on a random cap: convex surplus."""
    rng = _rng(seed)
    s = rng.uniform(1.0, 2.0)
    a = rng.uniform(0.1, 1.5)
    p = rng.uniform(1.0, 3.0)
    cap = rng.uniform(0.5, 3.0)
    return ProductionCurve.from_function(lambda c: s * c + a * c ** p, cap, steps)


def concave_params(seed) -> tuple[float, float, float, float]:
    """``(a, p, b, c_bar)`` for ``g = a c^p + b c`` with ``g'(c_bar) = 1``."""
    rng = _rng(seed)
    a = rng.uniform(0.5, 2.0)
    p = rng.uniform(0.3, 0.8)
    b = rng.uniform(0.0, 0.5)
    c_bar = ((1 - b) / (a * p)) ** (1 / (p - 1))
    return a, p, b, c_bar


def random_concave_curve(seed, steps: int = 4001) -> ProductionCurve:
    """Concave surplus with ``g(0) = 0`` sampled up to the surplus maximizer."""
    a, p, b, c_bar = concave_params(seed)
    return ProductionCurve.from_function(lambda c: a * c ** p + b * c, c_bar, steps)


def random_bottleneck_scenario(seed, n_types: int | None = None, steps: int = 41,
                               grid: GridConfig | None = None) -> Scenario:
    """Robust affine scenario of convex-surplus curves containing a bottleneck type.

    One type is a shrunken copy of another random convex curve, scaled so it
    has both the lowest endpoint output and the lowest output-to-cost ratio.
    """
    rng = _rng(seed)
    T = n_types or int(rng.integers(2, MAX_TYPES + 1))
    curves = {f"T{j}": random_convex_curve((*np.atleast_1d(seed).tolist(), j), steps)
              for j in range(1, T)}
    g_min = min(float(c.outputs[-1]) for c in curves.values())
    r_min = min(float(c.outputs[-1] / c.cost_cap) for c in curves.values())
    # bottleneck: g(c) = s c + a c^p with ratio s + a cap^(p-1) and value cap * ratio
    s = rng.uniform(1.0, max(1.0, min(r_min, 1.0 + 0.8 * (r_min - 1.0))))
    p = rng.uniform(1.0, 3.0)
    room = max(r_min - s, 0.0)
    cap = rng.uniform(0.2, 1.0) * min(g_min / r_min, 3.0)
    a = rng.uniform(0.0, 1.0) * room / max(cap ** (p - 1), 1e-12)
    curves["T0"] = ProductionCurve.from_function(lambda c: s * c + a * c ** p, cap, steps)
    techs = {t: curves[t].to_technology(t) for t in sorted(curves)}
    scen = Scenario(techs, AmbiguitySet.all_deltas(list(techs)), AffineFamily(),
                    grid or GridConfig(theta1_steps=401, theta0_steps=21))
    assert bottleneck_type(curves, 1e-9) == "T0"
    return scen
