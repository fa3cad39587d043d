import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlab.analysis import (
    FiniteDifferenceProbe,
    alternating_power_sum,
    atom_mass_estimate,
    bisector_grid_scan,
    comb_identity_check,
    default_probe,
    denominator_coefficient,
    hyperplane_mass_via_bisector,
    measure_identity_via_potentials,
    peak_quotient,
    potential,
    recovery_order,
    second_directional_difference,
    second_directional_functional,
)
from wlab.measures import DiscreteMeasure, dirac, euclidean
from wlab.sampling import measure_on, separated_points


def test_potential_examples():
    assert potential(dirac((1, 2)), 3, (4, 6)) == pytest.approx(125.0)
    assert potential(DiscreteMeasure([(0, 0.5), (1, 0.5)]), 2, 0) == 0.5


def test_denominator_examples():
    assert denominator_coefficient(0.5) == 2.0
    assert denominator_coefficient(1.5) == 2.0
    assert denominator_coefficient(3.0) == 8.0
    with pytest.raises(ValueError):
        denominator_coefficient(4.0)


def test_recovery_order_is_ceiling_of_half_p():
    assert [recovery_order(p) for p in (0.5, 1, 1.5, 3, 5, 7.2)] == [1, 1, 1, 2, 3, 4]


def test_comb_identity_examples():
    assert comb_identity_check(2, 1).ok and comb_identity_check(2, 1).value == 0
    assert comb_identity_check(3, 2).ok
    out = comb_identity_check(2, 2)
    assert not out.covered and out.value != 0
    # direct arithmetic for k = 2, exponent 2
    assert alternating_power_sum(2, 2) == sum(math.comb(4, j) * (-1) ** j * (2 - j) ** 2 for j in range(5))


def test_comb_identities_exact_up_to_eight():
    for k in range(2, 9):
        for m in range(1, k):
            assert alternating_power_sum(k, 2 * m) == 0


@given(st.floats(0.01, 16.0).filter(lambda p: not float(p).is_integer() or int(p) % 2))
def test_denominator_never_vanishes_off_even_integers(p):
    assert abs(denominator_coefficient(p)) > 0


def test_atom_recovery_example_at_atom():
    mu = DiscreteMeasure([((0, 0), 0.3), ((1, 0), 0.7)])
    probe = FiniteDifferenceProbe(3, (1.0, 0.37), tuple(2.0 ** -m for m in range(3, 12)))
    est = atom_mass_estimate(mu, 3, (0, 0), probe)
    assert est.estimates[-1] == pytest.approx(0.3, abs=1e-3)


def test_atom_recovery_example_off_atom_order():
    mu = DiscreteMeasure([((0, 0), 0.3), ((1, 0), 0.7)])
    probe = FiniteDifferenceProbe(3, (1.0, 0.37), tuple(2.0 ** -m for m in range(4, 14)))
    est = atom_mass_estimate(mu, 3, (0.5, 0), probe)
    assert abs(est.estimates[-1]) < 1e-3
    assert est.order == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0, 5.0])
def test_single_dirac_quotient_is_one(p):
    mu = dirac((0.2, -0.4))
    for s in (1e-1, 1e-2, 1e-3):
        assert peak_quotient(mu, p, (0.2, -0.4), (s, 0.0)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0, 5.0])
def test_recovery_on_separated_atoms(p):
    rng = np.random.default_rng(17)
    pts = separated_points(rng, 4, 2, -1e4, 1e4, 1e3)
    mu = measure_on(rng, pts, euclidean(2))
    h = 1e-3 * np.array([0.6, 0.8])
    for pt, w in mu:
        assert peak_quotient(mu, p, pt, h) == pytest.approx(w, abs=1e-3)


def test_probe_validation():
    with pytest.raises(ValueError):
        FiniteDifferenceProbe(3, (1, 0), (0.1, 0.2))
    with pytest.raises(ValueError):
        FiniteDifferenceProbe(3, (0, 0), (0.1,))
    with pytest.raises(ValueError):
        FiniteDifferenceProbe(2, (1, 0), (0.1,))


def test_default_probe_avoids_atom_gap():
    mu = DiscreteMeasure([((0, 0), 0.5), ((3, 0), 0.5)])
    probe = default_probe(mu, 3, np.random.default_rng(0), at=(1, 0))
    assert probe.steps[0] == pytest.approx(1 / 10)


def test_identification_examples():
    mu = DiscreteMeasure([(0, 0.5), (1, 0.5)])
    assert measure_identity_via_potentials(mu, mu, 3, [(0.25,)]).verdict == "identified equal"
    r = measure_identity_via_potentials(mu, dirac(0.5), 3, [(0.0,)])
    assert r.verdict == "separated" and r.witness == (0.0,)


def test_even_exponent_counterexample():
    # same mean and second moment: equal quadratic potentials
    mu = DiscreteMeasure([(-1, 0.5), (1, 0.5)])
    nu = DiscreteMeasure([(-2, 0.2), (0.5, 0.8)])
    grid = [(x,) for x in np.linspace(-3, 3, 13)]
    assert measure_identity_via_potentials(mu, nu, 2, grid).verdict == "indistinguishable"
    assert measure_identity_via_potentials(mu, nu, 3, grid).verdict == "separated"


@pytest.mark.parametrize("x, expected", [((1, 0), 6.0), ((0, 1), 2.0)])
def test_second_derivative_examples(x, expected):
    assert second_directional_functional(dirac((1, 0)), 4, x) == expected


def test_second_derivative_vanishes_at_origin_dirac():
    for x in ((1, 0), (0.6, 0.8)):
        assert second_directional_functional(dirac((0, 0)), 6, x) == 0.0


@pytest.mark.parametrize("p", [4, 6, 8])
def test_second_derivative_matches_quotient(p):
    rng = np.random.default_rng(p)
    mu = measure_on(rng, rng.uniform(-0.7, 0.7, size=(4, 2)), euclidean(2))
    for _ in range(5):
        x = rng.normal(size=2)
        x /= np.linalg.norm(x)
        exact = second_directional_functional(mu, p, x)
        assert second_directional_difference(mu, p, x, 1e-4) == pytest.approx(exact, abs=1e-6)


def test_second_derivative_rejects_bad_input():
    with pytest.raises(ValueError):
        second_directional_functional(dirac((1, 0)), 4, (1, 1))
    with pytest.raises(ValueError):
        second_directional_functional(dirac((1, 0)), 3, (1, 0))


def test_bisector_example():
    third = 1 / 3
    mu = DiscreteMeasure([((0, 5), third), ((2, 0), third), ((-2, 0), 1 - 2 * third)])
    r = hyperplane_mass_via_bisector(mu, (1, 0), 1, -1, 2)
    assert r.length == pytest.approx(third, abs=1e-15)
    assert r.direct_mass == pytest.approx(third, abs=1e-15)


def test_bisector_degenerate_cases():
    off = DiscreteMeasure([((1, 1), 0.5), ((2, 3), 0.5)])
    assert hyperplane_mass_via_bisector(off, (1, 0), 1, -1, 1).length == 0.0
    on = DiscreteMeasure([((0, 1), 0.5), ((0, -3), 0.5)])
    assert hyperplane_mass_via_bisector(on, (1, 0), 1, -1, 1.5).length == 1.0


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
def test_bisector_length_matches_lp_scan(p):
    mu = DiscreteMeasure([((0, 5), 0.25), ((0, -1), 0.25), ((2, 0), 0.5)])
    r = hyperplane_mass_via_bisector(mu, (1, 0), 1, -1, p)
    assert r.length == 0.5
    assert bisector_grid_scan(mu, (1, 0), 1, -1, p, step=1 / 64) == pytest.approx(0.5, abs=1 / 64)
