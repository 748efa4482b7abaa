from pathlib import Path

import numpy as np
import pytest

from robust_contracts import (AffineFamily, AmbiguitySet, GridConfig, LinearFamily,
                              ProductionCurve, Scenario, Technology)

FIXTURES = Path(__file__).parent / "fixtures"


def convex_1(steps=201):
    return ProductionCurve.from_function(lambda c: c + c ** 2 / 4, 2.0, steps)


def concave_1(steps=4001):
    return ProductionCurve.from_function(lambda c: 2 * np.sqrt(c), 1.0, steps)


def pair_scenario(curves, ambiguity=None, family=None, grid=None):
    techs = {t: cv.to_technology(t) for t, cv in curves.items()}
    amb = ambiguity or AmbiguitySet.all_deltas(list(techs))
    return Scenario(techs, amb, family or AffineFamily(), grid or GridConfig())


def convex_pair_curves(steps=201):
    return {"A": ProductionCurve.from_function(lambda c: c + c ** 2, 1.0, steps),
            "B": ProductionCurve.from_function(lambda c: 1.5 * c, 2.0, steps)}


def bottleneck_pair_curves(steps=201):
    return {"A": ProductionCurve.from_function(lambda c: c + c ** 2 / 4, 2.0, steps),
            "B": ProductionCurve.from_function(lambda c: c + c ** 2 / 8, 2.0, steps)}


def single(curve, family=None, tid="x", grid=None):
    return pair_scenario({tid: curve}, family=family, grid=grid)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def convex_pair():
    return pair_scenario(convex_pair_curves())


@pytest.fixture
def bottleneck_pair():
    return pair_scenario(bottleneck_pair_curves())


@pytest.fixture
def convex_one():
    return convex_1()


@pytest.fixture
def concave_one():
    return concave_1()


def tech(type_id, pairs):
    """Deterministic technology from ``(cost, output)`` pairs, outside option included."""
    return Technology.from_samples(type_id, [c for c, _ in pairs], [y for _, y in pairs])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: (int(k.rstrip("ab")), k)):
        ok, detail = results[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
