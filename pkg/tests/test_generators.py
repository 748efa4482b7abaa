import numpy as np
import pytest

from robust_contracts import solve_game_I, solve_game_II, solve_game_III, validate_scenario
from robust_contracts.generators import (random_bottleneck_scenario, random_concave_curve,
                                         random_convex_curve, random_scenario)
from robust_contracts.certification import classify_surplus
from robust_contracts.scenario_io import dumps, scenario_to_document


def test_seed_determinism():
    a = dumps(scenario_to_document(random_scenario(1)))
    b = dumps(scenario_to_document(random_scenario(1)))
    assert a == b
    assert a != dumps(scenario_to_document(random_scenario(2)))


def test_requested_size_validates():
    scen = random_scenario(5, n_types=3, n_actions=5)
    assert len(scen.types) == 3
    assert all(len(scen.technologies[t].actions) == 5 for t in scen.types)
    assert validate_scenario(scen) == []


def test_size_caps():
    with pytest.raises(ValueError):
        random_scenario(0, n_types=5)
    with pytest.raises(ValueError):
        random_scenario(0, n_actions=9)


def test_mixes_output_kinds():
    kinds = set()
    for s in range(20):
        scen = random_scenario(s)
        for t in scen.types:
            kinds.update(a.output.is_deterministic for a in scen.technologies[t].actions)
    assert kinds == {True, False}


def test_mean_reduction_preserves_affine_values():
    for s in range(10):
        scen = random_scenario(s)
        red = scen.mean_reduced()
        for solve in (solve_game_I, solve_game_II, solve_game_III):
            assert solve(scen).value == pytest.approx(solve(red).value, abs=1e-9)


def test_curve_generators_have_the_right_shape():
    for s in range(10):
        assert classify_surplus(random_convex_curve(s)).is_convex
        assert classify_surplus(random_concave_curve(s, 501)).is_concave


def test_bottleneck_scenarios_are_convex():
    scen = random_bottleneck_scenario(3)
    assert len(scen.types) >= 2
    for t in scen.types:
        assert np.all(np.diff(scen.technologies[t].costs) > 0)
