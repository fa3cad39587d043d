import math

import numpy as np
import pytest

from wlab.geometry import (
    AffineSubspace,
    barycenter,
    centered_spread,
    check_antipodal_plan,
    check_orthogonality,
    check_ratio_membership,
    check_translation_identity,
    dilate,
    dirac_ray,
    displacement_interpolate,
    geodesic,
    geodesic_defect,
    is_translate,
    ratio_point,
    ray_length,
    search_second_ratio_member,
    translate,
)
from wlab.measures import DiscreteMeasure, MeasureError, dirac, euclidean, powered_euclidean
from wlab.sampling import random_measure, stream
from wlab.transport import solve

R2 = euclidean(2)


def pair(seed, label, trial=0, space=R2, atoms=4):
    rng = stream(seed, label, trial)
    return random_measure(rng, space, atoms), random_measure(rng, space, atoms), rng


def test_interpolation_endpoints():
    mu, nu, _ = pair(0, "ends")
    curve = geodesic(mu, nu, 2)
    assert curve(0.0) == mu
    assert curve(curve.T) == nu
    with pytest.raises(ValueError):
        curve(curve.T * 1.01)


def test_interpolation_moves_mass_along_segments():
    mu = DiscreteMeasure([((0, 0), 0.5), ((2, 0), 0.5)])
    nu = DiscreteMeasure([((0, 2), 0.5), ((2, 2), 0.5)])
    plan = solve(mu, nu, 2).plan
    mid = displacement_interpolate(plan, 0.5)
    assert mid == DiscreteMeasure([((0, 1), 0.5), ((2, 1), 0.5)])


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_geodesic_has_unit_speed(p):
    for trial in range(10):
        mu, nu, rng = pair(1, "geodesic", trial)
        curve = geodesic(mu, nu, p)
        pairs = [tuple(sorted(rng.uniform(0, curve.T, 2))) for _ in range(10)]
        assert geodesic_defect(curve, pairs) <= 1e-8


def test_geodesic_needs_p_above_one():
    mu, nu, _ = pair(0, "p1")
    with pytest.raises(ValueError):
        geodesic(mu, nu, 1.0)


def test_dilation_examples():
    mu, _, _ = pair(0, "dilate")
    assert dilate(mu, (0.3, 0.1), 1.0) == mu
    assert dilate(mu, (0.3, 0.1), 0.0) == dirac((0.3, 0.1))
    assert dilate(dirac((1, 2)), (0, 0), -1.0) == dirac((-1, -2))


def test_dirac_ray_examples():
    x = (0.5, -0.5)
    _, nu, _ = pair(3, "ray")
    T = ray_length(x, nu, 2)
    assert dirac_ray(x, nu, 2, 0.0) == dirac(x)
    assert dirac_ray(x, nu, 2, T).isclose(nu, 1e-12) or dirac_ray(x, nu, 2, T) == nu
    far = dirac_ray(x, nu, 2, 2 * T)
    assert solve(dirac(x), far, 2).distance == pytest.approx(2 * T, abs=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_dirac_ray_is_geodesic_beyond_nu(p):
    x = np.array([0.2, 0.1])
    for trial in range(8):
        _, nu, rng = pair(4, "ray-geod", trial)
        T = ray_length(x, nu, p)
        for _ in range(8):
            s, t = sorted(rng.uniform(0, 3 * T, 2))
            d = solve(dirac_ray(x, nu, p, s), dirac_ray(x, nu, p, t), p).distance
            assert d == pytest.approx(t - s, abs=1e-8)


def test_dirac_ray_rejects_degenerate_input():
    with pytest.raises(ValueError):
        dirac_ray((0, 0), dirac((0, 0)), 2, 1.0)
    with pytest.raises(ValueError):
        dirac_ray((0, 0), dirac((1, 0)), 1.0, 1.0)


def test_antipodal_examples():
    mu = DiscreteMeasure([((1, 0), 0.5), ((0, 1), 0.5)])
    r = check_antipodal_plan(mu, (0, 0), 2)
    assert r.verdict == "strictly beaten"
    assert r.antipodal_cost == pytest.approx(4.0) and r.optimal_cost == pytest.approx(2.0)
    assert check_antipodal_plan(dirac((3, 1)), (0, 0), 2).verdict == "optimal"


def test_antipodal_collinear_at_p1_on_one_side_ties():
    # on a ray from x every coupling moves all mass across x, so all cost the same
    mu = DiscreteMeasure([((1, 0), 0.5), ((2, 0), 0.5)])
    r = check_antipodal_plan(mu, (0, 0), 1.0)
    assert r.verdict == "optimal" and r.gap == pytest.approx(0.0, abs=1e-15)


def test_antipodal_collinear_with_p_above_one_is_beaten():
    # the reflection reverses order on the line; the monotone coupling is cheaper
    mu = DiscreteMeasure([((1, 0), 0.5), ((2, 0), 0.5)])
    r = check_antipodal_plan(mu, (0, 0), 2)
    assert r.verdict == "strictly beaten"
    assert r.antipodal_cost == pytest.approx(10.0) and r.optimal_cost == pytest.approx(9.0)


@pytest.mark.parametrize("mu, expected", [
    (DiscreteMeasure([((0, 0), 0.5), ((2, 0), 0.5)]), (1.0, 0.0)),
    (dirac((3, -1)), (3.0, -1.0)),
    (DiscreteMeasure([(0, 0.3), (1, 0.7)]), (0.7,)),
])
def test_barycenter_examples(mu, expected):
    np.testing.assert_allclose(barycenter(mu), expected, atol=1e-15)


def test_barycenter_minimises_the_quadratic_potential():
    mu, _, _ = pair(8, "bary-min")
    m = barycenter(mu)
    spread = centered_spread(mu) ** 2
    rng = np.random.default_rng(0)
    for z in m + rng.normal(scale=0.3, size=(50, 2)):
        assert solve(mu, dirac(z), 2).cost >= spread - 1e-12


def test_translation_identity_random():
    for trial in range(30):
        mu, nu, rng = pair(5, "transl", trial)
        assert check_translation_identity(mu, nu, rng.uniform(-2, 2, 2)).ok


def test_translate_distance_and_criterion():
    mu, _, _ = pair(6, "t")
    v = np.array([0.6, -0.8])
    nu = translate(mu, v)
    assert solve(mu, nu, 2).distance == pytest.approx(1.0, abs=1e-12)
    assert is_translate(mu, nu)
    other, _, _ = pair(7, "t")
    assert not is_translate(mu, other)


def test_orthogonality_example():
    mu = DiscreteMeasure([((-1, 0), 0.5), ((1, 0), 0.5)])
    nu = DiscreteMeasure([((0, -2), 0.5), ((0, 2), 0.5)])
    L = AffineSubspace((0, 0), ((1, 0),))
    M = AffineSubspace((0, 0), ((0, 1),))
    r = check_orthogonality(mu, nu, L, M)
    assert r.supports_orthogonal and r.identity_holds
    assert r.w2_squared == pytest.approx(5.0) and r.rhs == pytest.approx(5.0)


def test_orthogonality_identity_fails_for_equal_measures():
    mu = DiscreteMeasure([((-1, 0), 0.5), ((1, 0), 0.5)])
    r = check_orthogonality(mu, mu)
    assert not r.identity_holds and r.relation == "less" and r.w2_squared == 0.0


def test_orthogonality_holds_for_diracs():
    assert check_orthogonality(dirac((0, 1)), dirac((2, 3))).identity_holds


def test_orthogonality_never_exceeds_rhs():
    for trial in range(30):
        mu, nu, _ = pair(9, "ort-ineq", trial)
        r = check_orthogonality(mu, nu)
        assert r.w2_squared <= r.rhs + 1e-12


def test_affine_subspace_membership():
    L = AffineSubspace((1, 1, 0), ((1, 0, 0), (0, 1, 0)))
    assert L.contains((5, -3, 0)) and not L.contains((0, 0, 1))
    M = AffineSubspace((0, 0, 2), ((0, 0, 1),))
    assert L.orthogonal_to(M)


def test_ratio_point_example():
    sp = powered_euclidean(1, 0.5)
    mu, nu = dirac(0, sp), dirac(1, sp)
    eta = ratio_point(mu, nu, 0.5)
    assert eta == DiscreteMeasure([(0, 0.5), (1, 0.5)], sp)
    assert check_ratio_membership(mu, nu, 0.5, eta).member


def test_ratio_equal_measures():
    mu, _, _ = pair(0, "ratio-eq")
    for lam in (0.1, 0.5, 0.9):
        eta = ratio_point(mu, mu, lam)
        r = check_ratio_membership(mu, mu, lam, eta)
        assert eta.isclose(mu, 1e-15) and r.member and r.d_mu_eta == 0.0


def test_mixture_never_exceeds_ratio_bound():
    for trial in range(20):
        mu, nu, rng = pair(10, "ratio-bound", trial)
        lam = float(rng.uniform(0.05, 0.95))
        eta = ratio_point(mu, nu, lam)
        assert solve(mu, eta, 1).distance <= lam * solve(mu, nu, 1).distance + 1e-12


def test_second_member_search_finds_midpoints_in_euclidean_space():
    # on the line many measures split W1 evenly, so the search must find one
    sp = euclidean(1)
    mu, nu = dirac(0, sp), dirac(1, sp)
    grid = [(i / 4,) for i in range(5)]
    found = search_second_ratio_member(mu, nu, 0.5, np.random.default_rng(0), 2000, grid=grid)
    assert found is not None and found != ratio_point(mu, nu, 0.5)


def test_second_member_search_is_empty_on_snowflake():
    sp = powered_euclidean(1, 0.5)
    mu, nu = dirac(0, sp), dirac(1, sp)
    grid = [(i / 4,) for i in range(5)]
    assert search_second_ratio_member(mu, nu, 0.5, np.random.default_rng(0), 2000, grid=grid) is None


def test_euclidean_only_constructions():
    sp = powered_euclidean(1, 0.5)
    with pytest.raises(MeasureError):
        barycenter(dirac(0.3, sp))
    with pytest.raises(ValueError):
        ratio_point(dirac(0), dirac(1), 1.0)


def test_geodesic_midpoint_lengths_add_up():
    mu, nu, _ = pair(12, "mid")
    curve = geodesic(mu, nu, 2)
    mid = curve(curve.T / 2)
    assert solve(mu, mid, 2).distance == pytest.approx(curve.T / 2, abs=1e-12)
    assert math.isclose(solve(mid, nu, 2).distance, curve.T / 2, abs_tol=1e-12)
