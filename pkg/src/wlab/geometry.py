"""Geodesics, dilations, translations, barycenters and ratio sets in
Wasserstein space over Euclidean (or general metric) ground spaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import DiscreteMeasure, MeasureError, as_point, dirac, mixture, normalize, pushforward
from .transport import TransportPlan, plan_cost, solve


def _require_euclidean(mu: DiscreteMeasure) -> None:
    if not mu.space.is_euclidean:
        raise MeasureError("this construction needs a Euclidean ground space")


def displacement_interpolate(plan: TransportPlan, t: float, T: float = 1.0) -> DiscreteMeasure:
    """Push ``plan`` forward through ``(x, y) -> (1 - t/T) x + (t/T) y``."""
    _require_euclidean(plan.source)
    if not 0.0 <= t <= T:
        raise ValueError(f"t={t} outside [0, {T}]")
    if t == T:
        return plan.target
    if t == 0:
        return plan.source
    s = t / T
    X, Y = plan.source.coords(), plan.target.coords()
    atoms = []
    for i, j in zip(*np.nonzero(plan.mass)):
        atoms.append(((1 - s) * X[i] + s * Y[j], plan.mass[i, j]))
    return DiscreteMeasure(atoms, plan.space)


@dataclass(frozen=True, eq=False)
class GeodesicCurve:
    """Constant-speed geodesic ``[0, T] -> W_p`` implemented by an optimal plan."""

    plan: TransportPlan
    T: float
    p: float

    def __call__(self, t: float) -> DiscreteMeasure:
        return displacement_interpolate(self.plan, t, self.T)


def geodesic(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> GeodesicCurve:
    """Geodesic from ``mu`` to ``nu`` parametrised by arc length (``p > 1``)."""
    _require_euclidean(mu)
    if p <= 1:
        raise ValueError("plan push-forward geodesics are built for p > 1 only")
    res = solve(mu, nu, p)
    return GeodesicCurve(res.plan, res.distance, p)


def dilate(mu: DiscreteMeasure, x, lam: float) -> DiscreteMeasure:
    """Push-forward under ``y -> x + lam (y - x)``."""
    _require_euclidean(mu)
    if lam == 1:
        return mu
    if lam == 0:
        return dirac(x, mu.space)
    c = np.asarray(as_point(x))
    return pushforward(mu, lambda y: c + lam * (y - c))


def dirac_ray(x, nu: DiscreteMeasure, p: float, t: float) -> DiscreteMeasure:
    """Point at arc length ``t >= 0`` on the geodesic ray from ``delta_x`` through ``nu``."""
    _require_euclidean(nu)
    x = as_point(x)
    if p <= 1:
        raise ValueError("Dirac rays are built for p > 1 only")
    if t < 0:
        raise ValueError("ray parameter must be nonnegative")
    if nu.points == (x,):
        raise ValueError("nu must differ from delta_x")
    T = solve(dirac(x, nu.space), nu, p).distance
    return dilate(nu, x, t / T)


def ray_length(x, nu: DiscreteMeasure, p: float) -> float:
    return solve(dirac(x, nu.space), nu, p).distance


@dataclass(frozen=True)
class AntipodalReport:
    verdict: str  # "optimal" or "strictly beaten"
    antipodal_cost: float
    optimal_cost: float
    gap: float


def check_antipodal_plan(mu: DiscreteMeasure, x, p: float, tol: float = 1e-12) -> AntipodalReport:
    """Compare the point-reflection map ``y -> 2x - y`` with an optimal plan
    from ``mu`` to its reflected image."""
    _require_euclidean(mu)
    c = np.asarray(as_point(x))
    nu = pushforward(mu, lambda y: 2 * c - y)
    col = {pt: j for j, pt in enumerate(nu.points)}
    mass = np.zeros((len(mu), len(nu)))
    for i, (pt, w) in enumerate(mu):
        mass[i, col[as_point(2 * c - np.asarray(pt))]] += w
    reflected = plan_cost(TransportPlan(mu, nu, mass), p)
    best = solve(mu, nu, p).cost
    gap = reflected - best
    verdict = "strictly beaten" if gap > tol * max(1.0, reflected) else "optimal"
    return AntipodalReport(verdict, reflected, best, gap)


def barycenter(mu: DiscreteMeasure) -> np.ndarray:
    _require_euclidean(mu)
    return mu.weight_array() @ mu.coords()


def translate(mu: DiscreteMeasure, v) -> DiscreteMeasure:
    _require_euclidean(mu)
    shift = np.asarray(as_point(v))
    return pushforward(mu, lambda y: y + shift)


def centered_spread(mu: DiscreteMeasure) -> float:
    """``W_2(mu, delta_{m(mu)})``."""
    diff = mu.coords() - barycenter(mu)
    return float(np.sqrt(mu.weight_array() @ np.einsum("ij,ij->i", diff, diff)))


@dataclass(frozen=True)
class IdentityReport:
    ok: bool
    lhs: float
    rhs: float
    deviation: float


def check_translation_identity(mu: DiscreteMeasure, nu: DiscreteMeasure, v,
                               tol: float = 1e-9) -> IdentityReport:
    """``W2^2(mu + v, nu) = W2^2(mu, nu) + <v, v + 2 m(mu) - 2 m(nu)>``, both sides solved."""
    v = np.asarray(as_point(v))
    lhs = solve(translate(mu, v), nu, 2).cost
    rhs = solve(mu, nu, 2).cost + float(v @ (v + 2 * barycenter(mu) - 2 * barycenter(nu)))
    dev = abs(lhs - rhs)
    return IdentityReport(dev <= tol, lhs, rhs, dev)


def is_translate(mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-9) -> bool:
    """Whether ``W2(mu, nu)`` equals the distance between the barycenters."""
    gap = np.linalg.norm(barycenter(nu) - barycenter(mu))
    return abs(solve(mu, nu, 2).distance - gap) <= tol


@dataclass(frozen=True)
class AffineSubspace:
    """``point + span(directions)``."""

    point: tuple[float, ...]
    directions: tuple[tuple[float, ...], ...] = ()

    def basis(self) -> np.ndarray:
        d = len(self.point)
        if not self.directions:
            return np.zeros((d, 0))
        q, _ = np.linalg.qr(np.asarray(self.directions, dtype=float).T)
        return q

    def contains(self, y, tol: float = 1e-12) -> bool:
        r = np.asarray(y, dtype=float) - np.asarray(self.point)
        B = self.basis()
        return bool(np.linalg.norm(r - B @ (B.T @ r)) <= tol * max(1.0, np.linalg.norm(r)))

    def orthogonal_to(self, other: AffineSubspace, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.basis().T @ other.basis()) <= tol))


@dataclass(frozen=True)
class OrthogonalityReport:
    supports_orthogonal: bool | None
    identity_holds: bool
    relation: str  # "equal" or "less"
    w2_squared: float
    rhs: float


def check_orthogonality(mu: DiscreteMeasure, nu: DiscreteMeasure,
                        L: AffineSubspace | None = None, M: AffineSubspace | None = None,
                        tol: float = 1e-9) -> OrthogonalityReport:
    """Test ``W2^2 = |m(mu) - m(nu)|^2 + sigma^2 + rho^2`` against the solver.

    When ``L`` and ``M`` are given, also verifies that they are orthogonal and
    carry the supports of ``mu`` and ``nu``.
    """
    _require_euclidean(mu)
    lhs = solve(mu, nu, 2).cost
    dm = barycenter(mu) - barycenter(nu)
    rhs = float(dm @ dm) + centered_spread(mu) ** 2 + centered_spread(nu) ** 2
    holds = abs(lhs - rhs) <= tol
    geometric = None
    if L is not None and M is not None:
        geometric = (L.orthogonal_to(M)
                     and all(L.contains(pt) for pt in mu.points)
                     and all(M.contains(pt) for pt in nu.points))
    return OrthogonalityReport(geometric, holds, "equal" if holds else "less", lhs, rhs)


def ratio_point(mu: DiscreteMeasure, nu: DiscreteMeasure, lam: float) -> DiscreteMeasure:
    """The mixture ``(1 - lam) mu + lam nu``."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    return mixture(mu, nu, lam)


@dataclass(frozen=True)
class RatioReport:
    member: bool
    d_mu_eta: float
    d_eta_nu: float
    d_mu_nu: float
    deviation: float


def check_ratio_membership(mu: DiscreteMeasure, nu: DiscreteMeasure, lam: float,
                           eta: DiscreteMeasure, p: float = 1.0, tol: float = 1e-9,
                           d_mu_nu: float | None = None) -> RatioReport:
    """Whether ``eta`` splits ``d(mu, nu)`` in the ratio ``lam : 1 - lam``."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    if d_mu_nu is None:
        d_mu_nu = solve(mu, nu, p).distance
    a = solve(mu, eta, p).distance
    dev = abs(a - lam * d_mu_nu)
    if dev > tol:
        return RatioReport(False, a, float("nan"), d_mu_nu, dev)
    b = solve(eta, nu, p).distance
    dev = max(dev, abs(b - (1 - lam) * d_mu_nu))
    return RatioReport(dev <= tol, a, b, d_mu_nu, dev)


def search_second_ratio_member(mu: DiscreteMeasure, nu: DiscreteMeasure, lam: float,
                               rng: np.random.Generator, budget: int = 10_000,
                               grid=None, p: float = 1.0, tol: float = 1e-9):
    """Randomised search for a ratio-set member other than the mixture.

    Candidates live on ``grid`` (default: the union of both supports). Returns
    the first member found that differs from the mixture, or ``None``; a
    ``None`` result is a bounded check, not a proof of uniqueness.
    """
    if grid is None:
        grid = sorted(set(mu.points) | set(nu.points))
    target = ratio_point(mu, nu, lam)
    d = solve(mu, nu, p).distance
    k = len(grid)
    base = np.array([target.weight_of(pt) for pt in grid])
    for trial in range(budget):
        if trial % 2:
            # perturbations of the mixture probe its neighbourhood
            w = np.clip(base + rng.normal(scale=0.05, size=k) * (rng.random(k) < 0.5), 0.0, None)
            if w.sum() <= 0:
                continue
        else:
            w = np.zeros(k)
            idx = rng.choice(k, size=int(rng.integers(1, k + 1)), replace=False)
            w[idx] = rng.dirichlet(np.ones(len(idx)))
        eta = normalize(zip(grid, w), mu.space)
        if eta.points == target.points and eta.isclose(target, 1e-9):
            continue
        if check_ratio_membership(mu, nu, lam, eta, p, tol, d_mu_nu=d).member:
            return eta
    return None


def geodesic_defect(curve: GeodesicCurve, pairs) -> float:
    """Largest ``|d(curve(s), curve(t)) - |s - t||`` over the given pairs."""
    worst = 0.0
    for s, t in pairs:
        d = solve(curve(s), curve(t), curve.p).distance
        worst = max(worst, abs(d - abs(s - t)))
    return worst
