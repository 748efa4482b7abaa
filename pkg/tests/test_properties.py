import warnings

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_contracts import (AffineContract, AmbiguitySet, SurplusCurve, best_response,
                              concave_envelope, worst_expectation)
from robust_contracts.agent import affine_response
from robust_contracts.generators import random_scenario
from robust_contracts.validation import check_scenario

seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_payoff_chain_holds(seed):
    _, failures = check_scenario(random_scenario(seed))
    assert not failures


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0, 5), st.floats(0, 1))
def test_fixed_wage_never_changes_the_choice(seed, theta0, theta1):
    scen = random_scenario(seed)
    for t in scen.types:
        tech = scen.technologies[t]
        a = best_response(AffineContract(0.0, theta1), tech)
        b = best_response(AffineContract(theta0, theta1), tech)
        assert a.index == b.index
        assert np.isclose(b.principal_payoff, a.principal_payoff - theta0)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_agent_payoff_nonnegative_and_nondecreasing_in_slope(seed):
    scen = random_scenario(seed)
    th = np.linspace(0, 1, 51)
    for t in scen.types:
        tech = scen.technologies[t]
        idx, _ = affine_response(tech, th)
        agent = th * tech.means[idx] - tech.costs[idx]
        assert np.all(agent >= -1e-12)
        assert np.all(np.diff(agent) >= -1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=40))
def test_envelope_dominates_and_is_concave(ys):
    xs = np.linspace(0, 1, len(ys))
    env = concave_envelope(SurplusCurve(xs, ys)).surplus
    assert np.all(env >= np.asarray(ys) - 1e-12)
    assert np.all(np.diff(env, 2) <= 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=5))
def test_worst_expectation_bounds(vals):
    types = [f"t{i}" for i in range(len(vals))]
    per = dict(zip(types, vals))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        robust, _ = worst_expectation(AmbiguitySet.all_deltas(types), per)
        bayes, _ = worst_expectation(AmbiguitySet.singleton({t: 1 / len(types) for t in types}), per)
    assert robust == min(vals)
    assert robust <= bayes + 1e-12
