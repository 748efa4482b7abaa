"""Two applied settings recast as surplus-curve problems.

Forest conservation: a landowner of nominal conservation type ``t`` with
quadratic opportunity cost, paid a share ``p`` of conservation value.
Salesforce: two effort levels whose worst-case expected sales form a pair of
linear production functions, one dominating the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .certification import bottleneck_type
from .model import (AffineFamily, AmbiguitySet, GridConfig, ProductionCurve, Scenario,
                    Technology, validate_scenario)

# --------------------------------------------------------------------------- #
# forest conservation
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ForestParams:
    k: float = 1.0       # value per conserved unit
    h: float = 1.0       # curvature of the quadratic opportunity cost
    t: float = 0.0       # nominal conservation type in [0, 1]
    a0: float = 0.0      # total forest area

    def __post_init__(self):
        if self.k <= 0 or self.h <= 0:
            raise ValueError("k and h must be positive")
        if not 0 <= self.t <= 1:
            raise ValueError("t must lie in [0, 1]")
        if self.a0 < 0:
            raise ValueError("a0 must be nonnegative")

    @property
    def offset(self) -> float:
        return self.k * self.t * self.a0

    @property
    def cost_cap(self) -> float:
        """Cost where ``g'`` falls to 1; surplus declines beyond it."""
        return self.k ** 2 / (2 * self.h)

    def g(self, c):
        return self.k * (np.sqrt(2 * np.asarray(c, dtype=float) / self.h) + self.t * self.a0)


def forest_curve(params: ForestParams, steps: int = 201, cost_cap: float | None = None) -> ProductionCurve:
    cap = params.cost_cap if cost_cap is None else float(cost_cap)
    return ProductionCurve.from_function(params.g, cap, steps)


def forest_technology(params: ForestParams, type_id: str = "forest", steps: int = 201,
                      cost_cap: float | None = None) -> Technology:
    curve = forest_curve(params, steps, cost_cap)
    return Technology.from_samples(type_id, curve.costs, curve.outputs)


def forest_linear_payoff(params: ForestParams, p: float) -> float:
    """Principal payoff ``(1 - p) k (p k / h + t a0)`` under the linear share ``p``."""
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    k, h = params.k, params.h
    return (1 - p) * k * (p * k / h + params.t * params.a0)


@dataclass(frozen=True)
class ForestRatio:
    t: float
    payoff_at_half: float
    surplus_upper_bound: float

    @property
    def ratio(self) -> float:
        return self.payoff_at_half / self.surplus_upper_bound


def forest_ratio_bound(params: ForestParams) -> ForestRatio:
    k, h = params.k, params.h
    bound = k ** 2 / (2 * h) + k * params.t * params.a0
    return ForestRatio(params.t, forest_linear_payoff(params, 0.5), bound)


def forest_ratio_sweep(params: ForestParams, ts=None) -> list[ForestRatio]:
    ts = np.linspace(0.0, 1.0, 5) if ts is None else ts
    return [forest_ratio_bound(ForestParams(params.k, params.h, float(t), params.a0)) for t in ts]


def forest_scenario(params: ForestParams, ts, *, steps: int = 201,
                    grid: GridConfig | None = None) -> Scenario:
    """Robust scenario over several conservation types sharing ``k``, ``h``, ``a0``."""
    techs = {}
    for t in ts:
        tid = f"t={float(t):g}"
        techs[tid] = forest_technology(ForestParams(params.k, params.h, float(t), params.a0),
                                       tid, steps)
    return Scenario(techs, AmbiguitySet.all_deltas(list(techs)), AffineFamily(),
                    grid or GridConfig(cost_steps=steps))


# --------------------------------------------------------------------------- #
# salesforce
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SalesforceParams:
    cost_low: float
    cost_high: float
    effort_low: float
    effort_high: float
    outputs: tuple[float, ...]              # y_0, y_1, ..., y_n
    abar: float
    deltas: tuple[float, ...] = field(default=())   # delta_1..delta_n; zeros if empty
    q: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(float(y) for y in self.outputs))
        n = len(self.outputs) - 1
        if n < 1:
            raise ValueError("need y_0 and at least one further output level")
        deltas = tuple(float(d) for d in self.deltas) or (0.0,) * n
        if len(deltas) != n:
            raise ValueError(f"expected {n} deltas, got {len(deltas)}")
        object.__setattr__(self, "deltas", deltas)
        if self.cost_high <= self.cost_low:
            raise ValueError("cost_high must exceed cost_low")
        if self.effort_high <= self.effort_low:
            raise ValueError("effort_high must exceed effort_low")
        if self.q <= 1:
            raise ValueError("q must exceed 1")

    @property
    def nominal_gain(self) -> float:
        """Nominal expected-output gain per unit of effort."""
        y0 = self.outputs[0]
        return sum(self.abar * (y - y0) for y in self.outputs[1:])

    @property
    def deviation(self) -> float:
        y0 = self.outputs[0]
        terms = [abs(d * (y - y0)) ** self.q for d, y in zip(self.deltas, self.outputs[1:])]
        return sum(terms) ** (1.0 / self.q)

    @property
    def cost_gap(self) -> float:
        return self.cost_high - self.cost_low

    def output_gap(self, worst: bool = True) -> float:
        gain = self.nominal_gain - (self.deviation if worst else 0.0)
        return (self.effort_high - self.effort_low) * gain


def salesforce_optimal_slope(params: SalesforceParams) -> float:
    """Optimal pay-per-output slope for inducing high effort.

    Cost gap over the worst-case expected-output gap; values above 1 exceed
    the admissible slopes and cannot be implemented by a limited-liability
    affine contract.
    """
    denom = params.output_gap(worst=True)
    if denom <= 0:
        raise ValueError("worst-case expected output nonpositive")
    return params.cost_gap / denom


def two_point_technology(type_id: str, cost_cap: float, output: float) -> Technology:
    return Technology.from_samples(type_id, [0.0, cost_cap], [0.0, output])


def dominating_pair_scenario(endpoints, *, grid: GridConfig | None = None,
                             eps: float = 1e-9) -> Scenario:
    """Robust affine scenario from two-point curves ``{type: (c_bar, g(c_bar))}``.

    The curves must be ordered by domination: some type has both the lowest
    output and the lowest output-to-cost ratio at full effort.
    """
    techs = {t: two_point_technology(t, float(c), float(g)) for t, (c, g) in endpoints.items()}
    if bottleneck_type(techs, eps) is None:
        raise ValueError("curves cross: no type is dominated at both output and efficiency")
    scen = Scenario(techs, AmbiguitySet.all_deltas(list(techs)), AffineFamily(),
                    grid or GridConfig())
    problems = validate_scenario(scen)
    if problems:
        raise ValueError("; ".join(str(v) for v in problems))
    return scen


def salesforce_curve(params: SalesforceParams, worst: bool = True) -> ProductionCurve:
    """Two-point curve with low effort normalized to the origin."""
    return ProductionCurve(np.array([0.0, params.cost_gap]),
                           np.array([0.0, params.output_gap(worst)]))


def salesforce_scenario(params: SalesforceParams, *, grid: GridConfig | None = None) -> Scenario:
    """Nominal and worst-case types; the worst case is dominated."""
    return dominating_pair_scenario({
        "nominal": (params.cost_gap, params.output_gap(worst=False)),
        "worst": (params.cost_gap, params.output_gap(worst=True)),
    }, grid=grid)
