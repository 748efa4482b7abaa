import numpy as np
import pytest

from robust_contracts import (Action, AffineContract, AmbiguitySet, GeneralFamily, OutputSpec,
                              ProductionCurve, ScheduleContract, Technology, production_curve,
                              validate_scenario)
from robust_contracts.model import GridConfig, validate_technology

from conftest import tech


def test_missing_outside_option_cites_assumption_3():
    t = Technology("A", (Action.deterministic(1, 2),))
    (v,) = validate_technology(t)
    assert v.assumption == 3


def test_no_positive_surplus_cites_assumption_5():
    t = tech("A", [(1, 0.5), (2, 2)])
    assert [v.assumption for v in validate_technology(t)] == [5]


def test_convex_pair_is_well_formed(convex_pair):
    assert validate_scenario(convex_pair) == []


def test_negative_cap_cites_assumption_6(convex_pair):
    bad = convex_pair.with_family(GeneralFamily((0.0, 1.0), -1.0))
    assert any(v.assumption == 6 for v in validate_scenario(bad))


def test_production_curve_readoff():
    curve = production_curve(tech("A", [(1, 2)]), cost_grid=[0, 1])
    assert curve.samples == [(0.0, 0.0), (1.0, 2.0)]


def test_production_curve_uses_mean():
    t = Technology("A", (Action.deterministic(0, 0),
                         Action(1.0, OutputSpec.distribution([(0, 0.5), (4, 0.5)]))))
    assert production_curve(t)(1.0) == pytest.approx(2.0)


def test_production_curve_takes_best_action_at_equal_cost():
    t = tech("A", [(1, 2), (1, 3)])
    assert production_curve(t)(1.0) == 3.0


def test_production_curve_empty():
    with pytest.raises(ValueError, match="no actions"):
        production_curve(Technology("A", ()))


def test_output_spec_rejects_bad_probs():
    with pytest.raises(ValueError):
        OutputSpec((0.0, 1.0), (0.5, 0.6))


def test_contract_evaluation():
    assert AffineContract(1, 0.5)(4) == 3
    sched = ScheduleContract((0, 3), (0, 2))
    assert sched(3) == 2
    with pytest.raises(ValueError):
        sched(1.5)


def test_ambiguity_rows():
    amb = AmbiguitySet.finite([{"A": 0.9, "B": 0.1}, {"A": 0.1, "B": 0.9}])
    assert amb.types == ("A", "B")
    assert amb.members[1] == {"A": 0.1, "B": 0.9}
    with pytest.raises(ValueError):
        AmbiguitySet.singleton({"A": 0.4, "B": 0.4})


def test_mean_reduction_keeps_costs():
    t = Technology("A", (Action.deterministic(0, 0),
                         Action(1.0, OutputSpec.distribution([(0, 0.25), (4, 0.75)]))))
    r = t.mean_reduced()
    assert r.is_deterministic
    np.testing.assert_allclose(r.means, [0, 3])
    np.testing.assert_allclose(r.costs, t.costs)


def test_curve_requires_increasing_costs():
    with pytest.raises(ValueError):
        ProductionCurve(np.array([0.0, 1.0, 1.0]), np.array([0.0, 1.0, 2.0]))


def test_grid_config_validates():
    with pytest.raises(ValueError):
        GridConfig(theta1_steps=1)
