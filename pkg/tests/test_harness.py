import json

import numpy as np
import pytest

from wlab import harness, transport
from wlab.measures import DiscreteMeasure

EXPECTED_SUITES = {
    "metric_axioms", "dirac_distance", "vallender", "flip_isometry", "snowflake", "geodesic",
    "dirac_ray", "antipodal", "translation_identity", "orthogonality", "atom_recovery",
    "comb_identities", "even_p_quotient", "bisector", "second_derivative", "marad_diagonal",
    "ratio_sets", "rotation_isometry", "rotation_negative_control",
}

# small budgets keep the determinism checks quick
SMALL = {name: 5 for name in EXPECTED_SUITES} | {"rotation_negative_control": 10_000}


def northwest_solver(mu, nu, p):
    """A plausible but wrong solver: the north-west corner plan, never improved."""
    a, b = mu.weight_array(), nu.weight_array()
    mass = np.zeros((len(a), len(b)))
    for (i, j), v in transport.northwest_corner(a, b).items():
        mass[i, j] = v
    plan = transport.TransportPlan(mu, nu, mass)
    cost = transport.plan_cost(plan, p)
    return transport.OTResult(cost, transport.distance_from_cost(cost, p), plan, p)


def test_registry_matches_suite_list():
    assert set(harness.suite_names()) == EXPECTED_SUITES
    assert set(harness.DEFAULT_BUDGETS) == EXPECTED_SUITES


def test_anchor_coverage_is_closed():
    cited = {s for statements in harness.ANCHORS.values() for s in statements}
    assert cited == harness.IN_SCOPE_STATEMENTS
    assert all(harness.ANCHORS[name] for name in EXPECTED_SUITES)


def test_unknown_suite():
    with pytest.raises(KeyError):
        harness.run_suite("no_such_suite")


def test_comb_identities_zero_deviation():
    for seed in (0, 1, 99):
        r = harness.run_suite("comb_identities", seed)
        assert r.ok and r.max_deviation == 0.0


def test_flip_suite_example():
    r = harness.run_suite("flip_isometry", seed=1, budget=200)
    assert r.ok and r.trials == 200 and r.max_deviation <= 1e-8


def test_negative_control_finds_violation():
    r = harness.run_suite("rotation_negative_control", seed=1)
    assert r.ok and r.max_deviation > 1e-8


def test_corrupted_solver_fails_metric_axioms():
    r = harness.run_suite("metric_axioms", seed=0, solver=northwest_solver)
    assert not r.ok
    failure = r.failures[0]
    assert {"seed", "trial", "p", "mu", "nu"} <= set(failure)


def test_failures_carry_replayable_inputs():
    r = harness.run_suite("metric_axioms", seed=0, budget=40, solver=northwest_solver)
    f = r.failures[0]
    mu, nu = DiscreteMeasure.from_json(f["mu"]), DiscreteMeasure.from_json(f["nu"])
    assert northwest_solver(mu, nu, f["p"]).cost > transport.solve(mu, nu, f["p"]).cost + 1e-10


def test_reports_are_byte_reproducible():
    for name in ("vallender", "marad_diagonal", "atom_recovery"):
        a = harness.run_suite(name, seed=3, budget=4).to_json(with_time=False)
        b = harness.run_suite(name, seed=3, budget=4).to_json(with_time=False)
        assert a == b
        assert json.loads(a)["suite"] == name


def test_suite_streams_do_not_depend_on_order():
    forward = [harness.run_suite(n, 2, 3).to_json(False) for n in ("vallender", "snowflake")]
    backward = [harness.run_suite(n, 2, 3).to_json(False) for n in ("snowflake", "vallender")]
    assert forward == backward[::-1]


def test_pass_vector_is_seed_independent():
    vectors = {harness.run_all(seed, SMALL).pass_vector() for seed in range(10)}
    assert vectors == {(True,) * len(EXPECTED_SUITES)}


def test_run_all_default_budgets_pass_quickly():
    agg = harness.run_all(0)
    assert agg.ok, [r.suite for r in agg.reports if not r.ok]
    assert agg.wall_time < 60
    text = harness.format_table(agg.reports)
    assert text.count("PASS") == len(EXPECTED_SUITES)


def test_aggregate_json_canonical():
    agg = harness.run_all(0, SMALL)
    data = json.loads(agg.to_json(with_time=False))
    assert data["ok"] and "wall_time" not in data
    assert [s["suite"] for s in data["suites"]] == harness.suite_names()
    assert agg.to_json(with_time=False) == json.dumps(data, sort_keys=True)
