from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlab.measures import DiscreteMeasure, MeasureError, dirac, euclidean, normalize
from wlab.onedim import (
    StepFunction,
    cdf,
    flip,
    l1_distance,
    quantile,
    snowflake_check,
    vallender_distance,
)
from wlab.sampling import dyadic_measure, random_measure, stream
from wlab.transport import solve

HALF = DiscreteMeasure([(0, 0.5), (1, 0.5)])


def test_cdf_examples():
    assert cdf(dirac(0.4)) == StepFunction((0.0, 0.4), (0.0, 1.0))
    F = cdf(HALF)
    assert F(0.0) == 0.5 and F(0.999) == 0.5 and F(1.0) == 1.0
    assert cdf(DiscreteMeasure([(0.2, 0.3), (0.9, 0.7)])).values == (0.0, 0.3, 1.0)


def test_quantile_examples():
    Q = quantile(cdf(dirac(0.4)))
    assert Q(0.0) == 0.4 and Q(0.99) == 0.4 and Q(1.0) == 1.0
    assert quantile(cdf(dirac(1.0))) == StepFunction((0.0,), (1.0,))
    assert quantile(cdf(HALF)) == StepFunction((0.0, 0.5), (0.0, 1.0))


def test_quantile_of_identity_staircase_is_within_one_step():
    n = 8
    F = StepFunction(tuple(i / n for i in range(n + 1)), tuple(i / n for i in range(n + 1)))
    Q = quantile(F)
    # the generalised inverse of the staircase is the staircase shifted by one step
    assert Q == StepFunction(tuple(i / n for i in range(n)), tuple((i + 1) / n for i in range(n)))
    assert max(abs(Q(y) - y) for y in [i / 64 for i in range(65)]) <= 1 / n


def test_step_function_validation():
    with pytest.raises(ValueError):
        StepFunction((0.1,), (1.0,))
    with pytest.raises(ValueError):
        StepFunction((0.0, 0.5), (0.5, 0.5))
    with pytest.raises(ValueError):
        cdf(dirac(1.5))


@pytest.mark.parametrize("mu, nu, expected", [
    (dirac(0), dirac(1), 1.0),
    (dirac(0.5), HALF, 0.5),
    (HALF, HALF, 0.0),
])
def test_vallender_examples(mu, nu, expected):
    assert vallender_distance(mu, nu) == expected


@pytest.mark.parametrize("t", [0.3, 0.5, 0.05, 0.95])
def test_flip_of_dirac_splits_mass(t):
    assert flip(dirac(t)) == DiscreteMeasure([(0, t), (1, 1 - t)])


def test_flip_endpoints_and_half():
    assert flip(HALF) == dirac(0.5)
    # t = 0 in the Dirac formula: all mass lands on 1
    assert flip(dirac(0.0)) == dirac(1.0)
    assert flip(dirac(1.0)) == dirac(0.0)


def test_flip_formula_on_general_measure():
    mu = DiscreteMeasure([(0.25, 0.5), (0.75, 0.5)])
    # F jumps to .5 at .25 and to 1 at .75; Q steps at .5 from .25 to .75
    assert flip(mu) == DiscreteMeasure([(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)])


def test_flip_requires_unit_interval():
    with pytest.raises(MeasureError):
        flip(dirac(-0.1))
    with pytest.raises(MeasureError):
        flip(dirac((0.1, 0.2)))


def test_flip_is_an_exact_involution_on_dyadic_measures():
    for trial in range(300):
        mu = dyadic_measure(stream(0, "involution", trial))
        assert flip(flip(mu)) == mu


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 64), st.integers(1, 16)), min_size=1, max_size=6))
def test_flip_involution_on_rational_supports(atoms):
    mu = normalize([(Fraction(x, 64), w) for x, w in atoms])
    back = flip(flip(mu))
    assert back.points == mu.points and back.isclose(mu, 1e-12)


def test_flip_preserves_w1():
    sp = euclidean(1)
    for trial in range(100):
        rng = stream(4, "flip-w1", trial)
        mu, nu = random_measure(rng, sp, low=0, high=1), random_measure(rng, sp, low=0, high=1)
        assert solve(flip(mu), flip(nu), 1).distance == pytest.approx(solve(mu, nu, 1).distance, abs=1e-12)


def test_vallender_matches_solver():
    sp = euclidean(1)
    for trial in range(100):
        rng = stream(5, "vallender", trial)
        mu, nu = random_measure(rng, sp, low=0, high=1), random_measure(rng, sp, low=0, high=1)
        assert vallender_distance(mu, nu) == pytest.approx(solve(mu, nu, 1).distance, abs=1e-12)


def test_l1_distance_piecewise():
    F = StepFunction((0.0, 0.5), (0.0, 1.0))
    G = StepFunction((0.0,), (1.0,))
    assert l1_distance(F, G) == 0.5


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_snowflake_diracs(p):
    r = snowflake_check(dirac(0.2), dirac(0.7), p)
    assert r.ok and r.closed_form == pytest.approx(0.5, abs=1e-15)


def test_snowflake_dirac_against_its_flip():
    t = 0.3
    r = snowflake_check(dirac(t), flip(dirac(t)), 2)
    assert r.ok and r.closed_form == pytest.approx(t * t + (1 - t) ** 2, abs=1e-15)


def test_snowflake_random_pairs():
    sp = euclidean(1)
    for trial in range(60):
        rng = stream(6, "snowflake", trial)
        mu = random_measure(rng, sp, max_atoms=5, low=0, high=1)
        nu = random_measure(rng, sp, max_atoms=5, low=0, high=1)
        for p in (1.5, 2.0, 3.0):
            assert snowflake_check(mu, nu, p).ok


def test_snowflake_rejects_small_p():
    with pytest.raises(ValueError):
        snowflake_check(HALF, HALF, 0.5)
