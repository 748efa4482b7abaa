"""Acceptance criteria 1-10, each reported as one PASS/FAIL line in the summary."""

import time
import warnings

import numpy as np
import pytest

from robust_contracts import (AffineContract, AmbiguitySet, ProductionCurve, best_response,
                              certify_affine_optimal, decompose_gap, quasiconcavity_scan,
                              solve_game_I, solve_game_II, solve_game_III)
from robust_contracts.cases import (ForestParams, SalesforceParams, forest_curve,
                                    forest_linear_payoff, forest_ratio_sweep,
                                    salesforce_curve, salesforce_optimal_slope,
                                    salesforce_scenario)
from robust_contracts.certification import adjustability_ratio_concave, affine_payoff_concave
from robust_contracts.games import grid_slack, per_type_game_II
from robust_contracts.generators import (concave_params, random_bottleneck_scenario,
                                         random_concave_curve, random_convex_curve,
                                         random_scenario)
from robust_contracts.validation import validate

from conftest import (bottleneck_pair_curves, convex_1, concave_1, convex_pair_curves,
                      pair_scenario, single)

RESULTS: dict[str, tuple[bool, str]] = {}


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    assert ok, detail


def test_criterion_01_payoff_chain():
    start = time.perf_counter()
    results = validate(200, 7)
    elapsed = time.perf_counter() - start
    bad = [r for r in results if not r.passed]
    ok = not bad and elapsed <= 120
    record("1", ok, f"{200 - len(bad)}/200 instances pass the ordering checks in {elapsed:.1f}s"
           + (f"; first failure {bad[0].failures}" if bad else ""))


def test_criterion_02_bottleneck_soundness():
    worst = 0.0
    uncertified = []
    for s in range(50):
        cert = certify_affine_optimal(random_bottleneck_scenario(s))
        if not cert.certified:
            uncertified.append((s, cert.reason))
        worst = max(worst, cert.measured_gap)
    rep = decompose_gap(pair_scenario(bottleneck_pair_curves()))
    pair_ok = abs(rep.adjustability_gap) <= rep.eps_val and abs(rep.information_rent) <= rep.eps_val
    record("2", not uncertified and worst <= 1e-4 and pair_ok,
           f"50 bottleneck scenarios: {50 - len(uncertified)} certified, max gap {worst:.2e}; "
           f"pair gaps ({rep.adjustability_gap:.1e}, {rep.information_rent:.1e})")


def test_criterion_03_convex_closed_forms():
    worst_th = worst_val = 0.0
    ok = True
    for s in range(50):
        cv = random_convex_curve(s)
        scen = single(cv)
        value, contract = per_type_game_II(scen, "x")
        th_star = cv.cost_cap / cv.outputs[-1]
        val_star = cv.outputs[-1] - cv.cost_cap
        cell = 1.0 / (scen.grid.theta1_steps - 1)
        d_th, d_val = abs(contract.theta1 - th_star), abs(value - val_star)
        worst_th, worst_val = max(worst_th, d_th), max(worst_val, d_val)
        ok &= d_th <= cell and d_val <= grid_slack(scen)
    v1, c1 = per_type_game_II(single(convex_1()), "x")
    ok &= abs(c1.theta1 - 2 / 3) <= 1e-9 and abs(v1 - 1.0) <= 1e-9
    record("3", ok, f"max |theta1 - c/g| {worst_th:.1e}, max value error {worst_val:.1e}; "
           f"CONVEX-1 ({c1.theta1:.6f}, {v1:.6f})")


def test_criterion_04_concave_ratio():
    worst = 0.0
    for s in range(50):
        cv = random_concave_curve(s, 4001)
        ratio = adjustability_ratio_concave(cv).value
        fb = float(np.max(cv.outputs - cv.costs))
        z2 = solve_game_II(single(cv)).value
        worst = max(worst, abs(ratio * fb - z2) / abs(z2))
    r1 = adjustability_ratio_concave(concave_1(10001)).value
    record("4", worst <= 1e-3 and abs(r1 - 0.5) <= 1e-3,
           f"max relative error {worst:.1e}; CONCAVE-1 ratio {r1:.5f}")


def test_criterion_05_concave_payoff_formula():
    worst = 0.0
    for s in range(20):
        a, p, b, c_bar = concave_params(s)
        cv = random_concave_curve(s, 10001)
        tech = cv.to_technology("x")
        # slopes whose tangency g'(c) = 1/theta1 lies in [0.05 c_bar, c_bar]; below that the
        # sampled agent snaps to a grid point and the reference itself is off by O(h / c)
        lo = 1.0 / (a * p * (0.05 * c_bar) ** (p - 1) + b)
        for th in np.linspace(lo, 0.95, 18):
            closed = affine_payoff_concave(cv, 0.0, th)
            brute = best_response(AffineContract(0.0, th), tech).principal_payoff
            worst = max(worst, abs(closed - brute) / abs(brute))
    record("5", worst <= 1e-3, f"max relative error {worst:.1e} over 20 curves x 18 slopes")


def test_criterion_06_bayesian_rent():
    scen = pair_scenario(convex_pair_curves(), AmbiguitySet.singleton({"A": 0.5, "B": 0.5}))
    rep = decompose_gap(scen)
    cert = certify_affine_optimal(pair_scenario(convex_pair_curves()), measure=False)
    ok = abs(rep.information_rent - 1 / 6) <= 1e-3 and not cert.certified
    record("6", ok, f"information rent {rep.information_rent:.6f} (target 1/6); "
           f"robust certificate: {cert.reason}")


def test_criterion_07_forest():
    worst_closed = 0.0
    for k, h, t, a0 in [(1, 1, 0, 0), (1, 1, 1, 1), (2, 3, 0.4, 5), (0.7, 0.2, 0.9, 2)]:
        p = ForestParams(k, h, t, a0)
        closed = k ** 2 / (4 * h) + k * t * a0 / 2
        worst_closed = max(worst_closed, abs(forest_linear_payoff(p, 0.5) - closed))
    sweep = [r.ratio for a0 in (0.0, 1.0, 10.0)
             for r in forest_ratio_sweep(ForestParams(a0=a0), np.linspace(0, 1, 41))]
    # the closed form also agrees with the agent's best response on the sampled curve
    cv = forest_curve(ForestParams(t=1, a0=1), 20001)
    brute = best_response(AffineContract(0, 0.5), cv.to_technology("f")).principal_payoff
    ok = worst_closed <= 1e-12 and min(sweep) >= 0.5 - 1e-9 and abs(brute - 0.75) <= 1e-3
    record("7", ok, f"closed-form error {worst_closed:.1e}; min sweep ratio {min(sweep):.6f}; "
           f"sampled payoff {brute:.5f}")


def test_criterion_08_salesforce():
    rng = np.random.default_rng(8)
    worst = 0.0
    uncertified = 0
    for _ in range(30):
        n = int(rng.integers(1, 4))
        ys = np.concatenate([[0.0], np.sort(rng.uniform(0.5, 3.0, n))])
        params = SalesforceParams(0.0, float(rng.uniform(0.1, 1.0)), 0.0, 1.0, tuple(ys),
                                  float(rng.uniform(0.3, 1.0)),
                                  tuple(rng.uniform(0.0, 0.2, n)), float(rng.uniform(1.5, 3)))
        if params.output_gap() <= params.cost_gap:
            continue
        slope = salesforce_optimal_slope(params)
        cv = salesforce_curve(params)
        scen = salesforce_scenario(params)
        solved = per_type_game_II(scen, "worst")[1].theta1
        worst = max(worst, abs(slope - cv.cost_cap / cv.outputs[-1]), abs(slope - solved))
        uncertified += not certify_affine_optimal(scen).certified
    record("8", uncertified == 0 and worst <= 1e-9,
           f"{uncertified} uncertified; max |slope - c/g| and |slope - solver| {worst:.1e}")


def test_criterion_09_mean_reduction():
    worst = 0.0
    for s in range(50):
        scen = random_scenario((9, s))
        red = scen.mean_reduced()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            for solve in (solve_game_I, solve_game_II, solve_game_III):
                worst = max(worst, abs(solve(scen).value - solve(red).value))
    record("9", worst <= 1e-9, f"max |z - z_reduced| {worst:.1e} over 50 scenarios")


def sine_surplus():
    return ProductionCurve.from_function(lambda c: np.sin(c) + c, np.pi, 2001)


def root_surplus(cap=4.0):
    return ProductionCurve.from_function(lambda c: 2 * np.sqrt(c) + c, cap, 4001)


def test_criterion_10a_sine_is_quasi_concave():
    (rep,) = quasiconcavity_scan(single(sine_surplus())).values()
    record("10a", rep.quasi_concave, f"sine surplus on [0, pi]: quasi_concave={rep.quasi_concave}")


@pytest.mark.xfail(strict=True, reason="the payoff for surplus 2*sqrt(c) is unimodal in theta1 "
                                       "on every bounded cost range; see decisions ledger")
def test_criterion_10b_root_surplus_is_not_quasi_concave():
    caps = (1.0, 4.0, 25.0, 400.0)
    flags = [next(iter(quasiconcavity_scan(single(root_surplus(c))).values())).quasi_concave
             for c in caps]
    record("10b", not any(flags),
           f"surplus 2*sqrt(c), caps {caps}: quasi_concave={flags} (expected all False)")
