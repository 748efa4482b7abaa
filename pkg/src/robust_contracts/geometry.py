"""Surplus-curve geometry: extremal points, concave envelopes, derivatives."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import ProductionCurve


@dataclass(frozen=True)
class SurplusCurve:
    """Samples of ``s(c) = g(c) - c``."""

    costs: np.ndarray
    surplus: np.ndarray

    def __post_init__(self):
        c = np.array(self.costs, dtype=float)
        s = np.array(self.surplus, dtype=float)
        if c.ndim != 1 or c.shape != s.shape or len(c) == 0:
            raise ValueError("surplus curve needs matching 1-d samples")
        c.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "costs", c)
        object.__setattr__(self, "surplus", s)

    @classmethod
    def from_production(cls, curve: ProductionCurve) -> "SurplusCurve":
        return cls(curve.costs, curve.outputs - curve.costs)

    @property
    def cost_cap(self) -> float:
        return float(self.costs[-1])

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(float(c), float(s)) for c, s in zip(self.costs, self.surplus)]

    def to_production(self) -> ProductionCurve:
        return ProductionCurve(self.costs, self.surplus + self.costs)


def extremal_point(curve: SurplusCurve, direction) -> tuple[float, float]:
    """Sample maximizing ``<(c, s), direction>``.

    Ties go to the larger output ``s + c`` (what the principal keeps a share
    of), then to the lower cost.
    """
    dx, dy = (float(v) for v in direction)
    c, s = curve.costs, curve.surplus
    score = dx * c + dy * s
    best = score.max()
    tied = np.flatnonzero(score >= best - 1e-12 * max(1.0, abs(best)))
    out = s[tied] + c[tied]
    k = tied[np.lexsort((c[tied], -out))[0]]
    return float(c[k]), float(s[k])


def upper_hull(x, y) -> np.ndarray:
    """Indices of the upper convex hull of the points, left to right (monotone chain).

    Among points sharing an ``x`` only the highest is kept; collinear points
    are dropped.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    order = np.lexsort((-y, x))
    hull: list[int] = []
    for i in order:
        if hull and x[hull[-1]] == x[i]:
            continue
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(int(i))
    return np.array(hull, dtype=int)


def concave_envelope(curve: SurplusCurve) -> SurplusCurve:
    """Smallest concave function above the samples, evaluated on the same costs."""
    idx = upper_hull(curve.costs, curve.surplus)
    env = np.interp(curve.costs, curve.costs[idx], curve.surplus[idx])
    # the hull passes through its own vertices exactly; guard interpolation round-off
    env = np.maximum(env, curve.surplus)
    return SurplusCurve(curve.costs, env)


def sampled_derivative(curve: ProductionCurve) -> np.ndarray:
    if len(curve.costs) < 3:
        slope = (curve.outputs[-1] - curve.outputs[0]) / (curve.costs[-1] - curve.costs[0])
        return np.full(len(curve.costs), slope)
    return np.gradient(curve.outputs, curve.costs, edge_order=2)


def derivative(curve: ProductionCurve, c: float) -> float:
    """``g'(c)`` by central differences on the grid, one-sided at the ends."""
    lo, hi = curve.costs[0], curve.costs[-1]
    span = hi - lo
    if c < lo - 1e-12 * span or c > hi + 1e-12 * span:
        raise ValueError(f"cost {c!r} outside the curve's domain [{lo}, {hi}]")
    return float(np.interp(c, curve.costs, sampled_derivative(curve)))


def inverse_derivative(curve: ProductionCurve, v: float, *, rtol: float = 1e-9) -> float:
    """Cost ``c`` with ``g'(c) = v``, by bisection on the sampled derivative.

    The sampled derivative must be strictly monotone. Values outside its
    range are clamped to the nearer end with a warning.
    """
    d = sampled_derivative(curve)
    steps = np.diff(d)
    scale = max(1.0, float(np.abs(d).max()))
    if len(d) < 2 or not (np.all(steps < -rtol * scale) or np.all(steps > rtol * scale)):
        raise ValueError("inverse of g' undefined: sampled derivative is not strictly monotone")
    decreasing = steps[0] < 0
    key = -d if decreasing else d
    target = -v if decreasing else v
    if target <= key[0]:
        if target < key[0]:
            warnings.warn(f"g' never reaches {v!r}; clamping to c={curve.costs[0]}", stacklevel=2)
        return float(curve.costs[0])
    if target >= key[-1]:
        if target > key[-1]:
            warnings.warn(f"g' never reaches {v!r}; clamping to c={curve.costs[-1]}", stacklevel=2)
        return float(curve.costs[-1])
    lo, hi = 0, len(key) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if key[mid] <= target:
            lo = mid
        else:
            hi = mid
    frac = (target - key[lo]) / (key[hi] - key[lo])
    return float(curve.costs[lo] + frac * (curve.costs[hi] - curve.costs[lo]))
