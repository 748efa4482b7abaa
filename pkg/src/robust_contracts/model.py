"""Domain types for distributionally robust principal-agent scenarios.

Everything here is immutable after construction. Structural problems
(mismatched lengths, probabilities that do not sum to one, unknown type ids)
raise ``ValueError`` immediately; violations of the modelling assumptions
(outside option, non-triviality, limited liability) are collected by
:func:`validate_scenario` and returned as data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

PROB_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------- #
# Actions and technologies
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class OutputSpec:
    """Output of one effort level: a finite distribution over output values."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("output distribution is empty")
        if len(self.values) != len(self.probs):
            raise ValueError("output values and probabilities differ in length")
        if any(p < 0 or p > 1 for p in self.probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(math.fsum(self.probs) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")

    @classmethod
    def deterministic(cls, y: float) -> "OutputSpec":
        return cls((float(y),), (1.0,))

    @classmethod
    def distribution(cls, pairs: Iterable[tuple[float, float]]) -> "OutputSpec":
        pairs = list(pairs)
        return cls(tuple(float(y) for y, _ in pairs), tuple(float(p) for _, p in pairs))

    @property
    def is_deterministic(self) -> bool:
        return len(self.values) == 1

    @property
    def mean(self) -> float:
        if self.is_deterministic:
            return self.values[0]
        return math.fsum(y * p for y, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class Action:
    cost: float
    output: OutputSpec

    @classmethod
    def deterministic(cls, cost: float, y: float) -> "Action":
        return cls(float(cost), OutputSpec.deterministic(y))

    @property
    def mean_output(self) -> float:
        return self.output.mean

    @property
    def is_outside_option(self) -> bool:
        return self.cost == 0 and self.output.is_deterministic and self.output.values[0] == 0


OUTSIDE_OPTION = Action.deterministic(0.0, 0.0)


@dataclass(frozen=True)
class Technology:
    """The finite action set available to one agent type."""

    type_id: str
    actions: tuple[Action, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))

    @classmethod
    def from_samples(cls, type_id, costs, outputs, *, add_outside_option=True) -> "Technology":
        """Deterministic technology with one action per ``(cost, output)`` sample."""
        costs = np.asarray(costs, dtype=float)
        outputs = np.asarray(outputs, dtype=float)
        if costs.shape != outputs.shape:
            raise ValueError("costs and outputs differ in length")
        actions = [Action.deterministic(c, y) for c, y in zip(costs, outputs)]
        if add_outside_option and not any(a.is_outside_option for a in actions):
            actions.insert(0, OUTSIDE_OPTION)
        return cls(str(type_id), tuple(actions))

    @classmethod
    def from_curve(cls, type_id, g: Callable[[np.ndarray], np.ndarray], cost_cap: float,
                   steps: int = 201) -> "Technology":
        """Sample a production function ``g`` on ``steps`` equally spaced costs."""
        if steps < 2:
            raise ValueError("cost grid needs at least 2 points")
        costs = np.linspace(0.0, float(cost_cap), steps)
        return cls.from_samples(type_id, costs, np.asarray(g(costs), dtype=float))

    @property
    def cost_cap(self) -> float:
        return max(a.cost for a in self.actions)

    @cached_property
    def costs(self) -> np.ndarray:
        return _frozen([a.cost for a in self.actions])

    @cached_property
    def means(self) -> np.ndarray:
        return _frozen([a.mean_output for a in self.actions])

    @cached_property
    def response_order(self) -> np.ndarray:
        """Action indices sorted by cost, then input order (final tie-break keys)."""
        order = np.lexsort((np.arange(len(self.actions)), self.costs))
        order.setflags(write=False)
        return order

    @property
    def is_deterministic(self) -> bool:
        return all(a.output.is_deterministic for a in self.actions)

    def first_best(self) -> tuple[float, int]:
        """Maximal social surplus ``E[y] - c`` and the index attaining it."""
        surplus = self.means - self.costs
        order = self.response_order
        k = order[int(np.argmax(surplus[order]))]
        return float(surplus[k]), int(k)

    def mean_reduced(self) -> "Technology":
        """Same technology with each output replaced by its mean."""
        return Technology(self.type_id, tuple(Action.deterministic(a.cost, a.mean_output)
                                              for a in self.actions))

    def scaled(self, lam: float) -> "Technology":
        acts = tuple(Action(a.cost * lam, OutputSpec(tuple(v * lam for v in a.output.values),
                                                     a.output.probs))
                     for a in self.actions)
        return Technology(self.type_id, acts)


@dataclass(frozen=True)
class ProductionCurve:
    """Sampled production function ``g``: maximum expected output per cost."""

    costs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.costs)
        g = _frozen(self.outputs)
        if c.ndim != 1 or c.shape != g.shape or len(c) == 0:
            raise ValueError("production curve needs matching 1-d cost/output samples")
        if len(c) > 1 and np.any(np.diff(c) <= 0):
            raise ValueError("production curve costs must be strictly increasing")
        object.__setattr__(self, "costs", c)
        object.__setattr__(self, "outputs", g)

    @classmethod
    def from_function(cls, g, cost_cap, steps=201) -> "ProductionCurve":
        c = np.linspace(0.0, float(cost_cap), steps)
        return cls(c, np.asarray(g(c), dtype=float))

    @property
    def cost_cap(self) -> float:
        return float(self.costs[-1])

    @property
    def samples(self) -> list[tuple[float, float]]:
        return [(float(c), float(g)) for c, g in zip(self.costs, self.outputs)]

    @property
    def surplus(self) -> np.ndarray:
        return self.outputs - self.costs

    def __call__(self, c):
        return np.interp(c, self.costs, self.outputs)

    def to_technology(self, type_id: str) -> Technology:
        return Technology.from_samples(type_id, self.costs, self.outputs)


def production_curve(technology: Technology, cost_grid: Sequence[float] | None = None,
                     eps_tie: float = 1e-9) -> ProductionCurve:
    """Maximum expected output as a function of effort cost.

    Without ``cost_grid`` the curve is sampled at the distinct action costs and
    ``g(c)`` is the best mean output among actions costing exactly ``c`` (costs
    closer than ``eps_tie`` are merged). With a grid, ``g(c)`` is the best mean
    output among actions costing at most ``c + eps_tie``; the grid must span
    ``[0, cost_cap]``.
    """
    if not technology.actions:
        raise ValueError("no actions")
    costs, means = technology.costs, technology.means
    if cost_grid is None:
        order = np.argsort(costs, kind="stable")
        grid: list[float] = []
        best: list[float] = []
        for k in order:
            if grid and costs[k] - grid[-1] <= eps_tie:
                best[-1] = max(best[-1], means[k])
            else:
                grid.append(float(costs[k]))
                best.append(float(means[k]))
        return ProductionCurve(np.array(grid), np.array(best))

    grid = np.asarray(cost_grid, dtype=float)
    cap = technology.cost_cap
    if grid.min() > eps_tie or abs(grid.max() - cap) > eps_tie or grid.min() < -eps_tie:
        raise ValueError(f"cost grid must include 0 and the cost cap {cap!r}")
    out = np.empty_like(grid)
    for i, c in enumerate(grid):
        mask = costs <= c + eps_tie
        out[i] = means[mask].max() if mask.any() else 0.0
    return ProductionCurve(grid, out)


# --------------------------------------------------------------------------- #
# Contracts
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class AffineFamily:
    """Payments ``theta0 + theta1 * y`` with ``theta0 >= 0`` and ``theta1`` in [0, 1]."""

    theta0_max: float | None = None
    variant = "affine"
    surjective = True


@dataclass(frozen=True)
class LinearFamily:
    """Payments ``theta1 * y``; not surjective in general."""

    variant = "linear"
    surjective = False


@dataclass(frozen=True)
class ConstantFamily:
    """Fixed payment ``theta0 >= 0`` regardless of output."""

    theta0_max: float | None = None
    variant = "constant"
    surjective = True


@dataclass(frozen=True)
class GeneralFamily:
    """Arbitrary nonnegative payment schedules on a finite output grid.

    Game I searches the product of ``payment_steps`` equally spaced levels on
    ``[0, payment_cap]`` over every grid output.
    """

    output_grid: tuple[float, ...]
    payment_cap: float
    payment_steps: int = 8
    variant = "general"
    surjective = True

    def __post_init__(self):
        object.__setattr__(self, "output_grid", tuple(float(y) for y in self.output_grid))
        if len(set(self.output_grid)) != len(self.output_grid):
            raise ValueError("output grid has duplicate values")
        if self.payment_steps < 1:
            raise ValueError("payment_steps must be positive")

    @property
    def payment_levels(self) -> np.ndarray:
        if self.payment_steps == 1:
            return np.zeros(1)
        return np.linspace(0.0, max(self.payment_cap, 0.0), self.payment_steps)


ContractFamily = Union[AffineFamily, LinearFamily, ConstantFamily, GeneralFamily]


@dataclass(frozen=True)
class AffineContract:
    """A member of the affine, linear or constant family."""

    theta0: float = 0.0
    theta1: float = 0.0
    variant: str = "affine"

    def pay(self, y):
        return self.theta0 + self.theta1 * np.asarray(y, dtype=float)

    def __call__(self, y):
        return self.pay(y)

    @property
    def params(self) -> dict:
        return {"theta0": float(self.theta0), "theta1": float(self.theta1)}


@dataclass(frozen=True)
class ScheduleContract:
    """A general contract given as a payment table over output values."""

    outputs: tuple[float, ...]
    payments: tuple[float, ...]
    variant: str = "general"
    tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(float(y) for y in self.outputs))
        object.__setattr__(self, "payments", tuple(float(p) for p in self.payments))
        if len(self.outputs) != len(self.payments):
            raise ValueError("schedule outputs and payments differ in length")

    def pay(self, y):
        ys = np.asarray(y, dtype=float)
        grid = np.asarray(self.outputs)
        idx = np.abs(ys[..., None] - grid).argmin(axis=-1)
        if np.any(np.abs(grid[idx] - ys) > self.tol):
            raise ValueError(f"output {ys!r} is not on the contract's output grid")
        out = np.asarray(self.payments)[idx]
        return out if out.ndim else float(out)

    def __call__(self, y):
        return self.pay(y)

    @property
    def params(self) -> dict:
        return {"outputs": list(self.outputs), "payments": list(self.payments)}


Contract = Union[AffineContract, ScheduleContract]


# --------------------------------------------------------------------------- #
# Ambiguity sets
# --------------------------------------------------------------------------- #

AMBIGUITY_VARIANTS = ("singleton", "all_deltas", "finite", "full_simplex")


@dataclass(frozen=True)
class AmbiguitySet:
    """Plausible type distributions, stored as rows over ``types``.

    ``singleton`` has one row, ``finite`` one row per listed distribution, and
    ``all_deltas``/``full_simplex`` keep the identity rows (the vertices of the
    simplex, where a linear objective attains its minimum).
    """

    variant: str
    types: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        if self.variant not in AMBIGUITY_VARIANTS:
            raise ValueError(f"unknown ambiguity variant {self.variant!r}")
        object.__setattr__(self, "types", tuple(str(t) for t in self.types))
        w = _frozen(np.atleast_2d(self.weights))
        if w.shape[1] != len(self.types) or w.shape[0] == 0:
            raise ValueError("ambiguity weights do not match the type list")
        if len(set(self.types)) != len(self.types):
            raise ValueError("ambiguity set lists a type twice")
        if np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1.0) > PROB_TOL):
            raise ValueError("each distribution must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def singleton(cls, dist: Mapping[str, float]) -> "AmbiguitySet":
        types = tuple(dist)
        return cls("singleton", types, np.array([[dist[t] for t in types]], dtype=float))

    @classmethod
    def all_deltas(cls, types: Sequence[str]) -> "AmbiguitySet":
        return cls("all_deltas", tuple(types), np.eye(len(types)))

    @classmethod
    def full_simplex(cls, types: Sequence[str]) -> "AmbiguitySet":
        return cls("full_simplex", tuple(types), np.eye(len(types)))

    @classmethod
    def finite(cls, dists: Sequence[Mapping[str, float]]) -> "AmbiguitySet":
        types: list[str] = []
        for d in dists:
            types.extend(t for t in d if t not in types)
        w = np.array([[d.get(t, 0.0) for t in types] for d in dists], dtype=float)
        return cls("finite", tuple(types), w)

    @property
    def members(self) -> list[dict[str, float]]:
        return [{t: float(p) for t, p in zip(self.types, row)} for row in self.weights]

    @property
    def is_robust(self) -> bool:
        return self.variant in ("all_deltas", "full_simplex")


# --------------------------------------------------------------------------- #
# Scenario
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class GridConfig:
    """Solver resolution and tolerances.

    ``breakpoints`` adds, per type, the exact contract slopes at which the
    agent switches actions to the ``theta1`` grid; the affine optimum always
    sits at one of them, so grid results become exact up to rounding.
    """

    theta1_steps: int = 2001
    theta0_steps: int = 101
    theta0_max: float | None = None
    cost_steps: int = 201
    eps_tie: float = 1e-9
    eps_val: float = 1e-6
    breakpoints: bool = True
    general_max_outputs: int = 6
    general_max_levels: int = 8

    def __post_init__(self):
        for name in ("theta1_steps", "theta0_steps", "cost_steps"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be at least 2")
        if self.eps_tie < 0 or self.eps_val < 0:
            raise ValueError("tolerances must be nonnegative")

    def replace(self, **changes) -> "GridConfig":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class Scenario:
    technologies: Mapping[str, Technology]
    ambiguity: AmbiguitySet
    family: ContractFamily
    grid: GridConfig = field(default_factory=GridConfig)

    def __post_init__(self):
        techs = dict(self.technologies)
        for key, tech in techs.items():
            if key != tech.type_id:
                raise ValueError(f"technology keyed {key!r} has type_id {tech.type_id!r}")
        missing = [t for t in self.ambiguity.types if t not in techs]
        if missing:
            raise ValueError(f"ambiguity set references undeclared types {missing}")
        object.__setattr__(self, "technologies", techs)

    @property
    def types(self) -> tuple[str, ...]:
        return self.ambiguity.types

    def with_family(self, family: ContractFamily) -> "Scenario":
        return Scenario(self.technologies, self.ambiguity, family, self.grid)

    def with_ambiguity(self, ambiguity: AmbiguitySet) -> "Scenario":
        return Scenario(self.technologies, ambiguity, self.family, self.grid)

    def with_grid(self, **changes) -> "Scenario":
        return Scenario(self.technologies, self.ambiguity, self.family, self.grid.replace(**changes))

    def mean_reduced(self) -> "Scenario":
        techs = {t: tech.mean_reduced() for t, tech in self.technologies.items()}
        return Scenario(techs, self.ambiguity, self.family, self.grid)

    def theta0_max(self) -> float:
        if self.grid.theta0_max is not None:
            return float(self.grid.theta0_max)
        fam_max = getattr(self.family, "theta0_max", None)
        if fam_max is not None:
            return float(fam_max)
        return max(float(self.technologies[t].means.max()) for t in self.types)


# --------------------------------------------------------------------------- #
# Reports
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class TypeSummary:
    first_best: float
    game_II_value: float
    agent_action: Action


@dataclass(frozen=True)
class GapReport:
    z_I: float
    z_II: float
    z_III: float
    best_contract: Contract
    per_type: Mapping[str, TypeSummary]
    eps_val: float = 1e-6
    envelope_bounds: Mapping[str, dict] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    @property
    def adjustability_gap(self) -> float:
        return self.z_III - self.z_II

    @property
    def information_rent(self) -> float:
        return self.z_II - self.z_I

    @property
    def optimality_gap_bound(self) -> float:
        return self.z_III - self.z_I


# --------------------------------------------------------------------------- #
# Validation
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Violation:
    assumption: int | None
    where: str
    message: str

    def __str__(self):
        tag = f"Assumption {self.assumption}" if self.assumption else "structure"
        return f"{self.where}: {self.message} ({tag})"


def validate_technology(tech: Technology, where: str | None = None) -> list[Violation]:
    where = where or f"types[{tech.type_id}]"
    out: list[Violation] = []
    if not tech.actions:
        return [Violation(None, where, "no actions")]
    if not any(a.is_outside_option for a in tech.actions):
        out.append(Violation(3, where, "missing the outside option (cost 0, output 0)"))
    for i, a in enumerate(tech.actions):
        if a.cost < 0:
            out.append(Violation(6, f"{where}.actions[{i}]", f"negative cost {a.cost!r}"))
        if any(y < 0 for y in a.output.values):
            out.append(Violation(6, f"{where}.actions[{i}]", "negative output value"))
    if not np.any(tech.means - tech.costs > 0):
        out.append(Violation(5, where, "no action has positive surplus E[y] - c"))
    return out


def validate_family(family: ContractFamily) -> list[Violation]:
    out: list[Violation] = []
    t0 = getattr(family, "theta0_max", None)
    if t0 is not None and t0 < 0:
        out.append(Violation(6, "family", f"theta0_max {t0!r} allows negative payments"))
    if isinstance(family, GeneralFamily):
        if family.payment_cap < 0:
            out.append(Violation(6, "family", f"payment cap {family.payment_cap!r} is negative"))
        if any(y < 0 for y in family.output_grid):
            out.append(Violation(6, "family", "output grid has negative values"))
    return out


def validate_scenario(scenario: Scenario) -> list[Violation]:
    """Every assumption breach in ``scenario``; empty when it is well formed."""
    out: list[Violation] = []
    for t in scenario.types:
        out.extend(validate_technology(scenario.technologies[t], f"types[{t}]"))
    out.extend(validate_family(scenario.family))
    fam = scenario.family
    if isinstance(fam, GeneralFamily):
        grid = np.asarray(fam.output_grid)
        for t in scenario.types:
            for i, a in enumerate(scenario.technologies[t].actions):
                for y in a.output.values:
                    if grid.size == 0 or np.abs(grid - y).min() > scenario.grid.eps_tie:
                        out.append(Violation(None, f"types[{t}].actions[{i}]",
                                             f"output {y!r} is off the general family's grid"))
    return out
