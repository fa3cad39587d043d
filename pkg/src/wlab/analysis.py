"""Potential functions of measures and what can be read off from them.

The atom-recovery quotient is a high-order finite difference whose numerator
cancels to roughly ``step ** (2k)`` relative to the potential values, so it is
evaluated in extended precision with mpmath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import mpmath
import numpy as np

from .measures import DiscreteMeasure, MeasureError, as_point
from .transport import solve

WORKING_DPS = 80


def _norm_pow(vec, p, ctx=mpmath):
    sq = ctx.fsum(c * c for c in vec)
    if sq == 0:
        return ctx.mpf(0)
    return ctx.power(sq, ctx.mpf(p) / 2)


def potential(mu: DiscreteMeasure, p: float, x) -> float:
    """``sum_i w_i |x - y_i| ** p``, the transport cost from ``mu`` to ``delta_x``."""
    if not mu.space.is_euclidean:
        raise MeasureError("potentials need a Euclidean ground space")
    x = np.asarray(as_point(x))
    r = np.linalg.norm(mu.coords() - x, axis=1)
    return math.fsum(mu.weight_array() * r ** p)


def _potential_mp(mu: DiscreteMeasure, p, x) -> mpmath.mpf:
    total = []
    for pt, w in mu:
        diff = [mpmath.mpf(a) - b for a, b in zip(pt, x)]
        total.append(mpmath.mpf(w) * _norm_pow(diff, p))
    return mpmath.fsum(total)


def is_even_integer(p: float) -> bool:
    return float(p).is_integer() and int(p) % 2 == 0


def recovery_order(p: float) -> int:
    """``k = ceil(p / 2)``."""
    return math.ceil(p / 2)


def denominator_coefficient(p: float, k: int | None = None, allow_even: bool = False) -> float:
    """``sum_{j=0}^{2k} C(2k, j) (-1)^j |k - j|^p``.

    Twice the half sum over ``j < k`` since the ``j = k`` term vanishes.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if is_even_integer(p) and not allow_even:
        raise ValueError("even integer exponents cannot be used to recover atoms")
    if k is None:
        k = recovery_order(p)
    with mpmath.workdps(WORKING_DPS):
        half = mpmath.fsum(comb(2 * k, j) * (-1) ** j * mpmath.power(k - j, p) for j in range(k))
        return float(2 * half)


def alternating_power_sum(k: int, e: int) -> int:
    """Exact ``sum_{j=0}^{k-1} C(2k, j) (-1)^j (k - j)^e``."""
    return sum(comb(2 * k, j) * (-1) ** j * (k - j) ** e for j in range(k))


@dataclass(frozen=True)
class CombReport:
    k: int
    m: int
    value: int
    covered: bool  # 1 <= m < k, where the sum must vanish

    @property
    def ok(self) -> bool:
        return self.value == 0 if self.covered else True


def comb_identity_check(k: int, m: int) -> CombReport:
    """Evaluate the alternating sum with exponent ``2m`` in exact integers."""
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive integers")
    return CombReport(k, m, alternating_power_sum(k, 2 * m), m < k)


@dataclass(frozen=True)
class FiniteDifferenceProbe:
    """Direction and step schedule for the atom-recovery quotient."""

    p: float
    direction: tuple[float, ...]
    steps: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(s <= 0 for s in self.steps) or any(a <= b for a, b in zip(self.steps, self.steps[1:])):
            raise ValueError("steps must be positive and strictly decreasing")
        if not any(self.direction):
            raise ValueError("probe direction must be nonzero")
        if is_even_integer(self.p):
            raise ValueError("even integer exponents cannot be used to recover atoms")

    @property
    def k(self) -> int:
        return recovery_order(self.p)

    @property
    def unit_direction(self) -> np.ndarray:
        h = np.asarray(self.direction, dtype=float)
        return h / np.linalg.norm(h)


def default_probe(mu: DiscreteMeasure, p: float, rng: np.random.Generator,
                  n_steps: int = 12, at=None) -> FiniteDifferenceProbe:
    """Geometric steps from ``gap / (5k)`` and a random direction avoiding
    directions orthogonal to any atom difference.

    ``gap`` is the smallest distance between atoms, also counting the probe
    point ``at`` when it is not an atom itself.
    """
    k = recovery_order(p)
    X = mu.coords()
    if at is not None and as_point(at) not in mu.points:
        X = np.vstack([X, np.asarray(as_point(at))])
    diffs = [X[i] - X[j] for i in range(len(X)) for j in range(i)]
    gap = min((np.linalg.norm(d) for d in diffs), default=1.0)
    while True:
        h = rng.normal(size=mu.dim)
        h /= np.linalg.norm(h)
        if all(abs(h @ d) > 1e-6 * np.linalg.norm(d) for d in diffs):
            break
    s0 = gap / (5 * k)
    return FiniteDifferenceProbe(p, tuple(h), tuple(s0 * 2.0 ** -m for m in range(n_steps)))


def peak_quotient(mu: DiscreteMeasure, p: float, x, h, allow_even: bool = False) -> float:
    """The normalised 2k-th central difference of the potential at ``x`` with step vector ``h``."""
    k = recovery_order(p)
    den = denominator_coefficient(p, k, allow_even=allow_even)
    x = as_point(x)
    with mpmath.workdps(WORKING_DPS):
        hs = [mpmath.mpf(c) for c in h]
        num = mpmath.fsum(
            comb(2 * k, j) * (-1) ** j
            * _potential_mp(mu, p, [mpmath.mpf(xi) + (k - j) * hi for xi, hi in zip(x, hs)])
            for j in range(2 * k + 1))
        return float(num / (den * _norm_pow(hs, p)))


@dataclass(frozen=True)
class AtomEstimate:
    steps: tuple[float, ...]
    estimates: tuple[float, ...]
    order: float  # least-squares slope of log|estimate| against log(step)


def atom_mass_estimate(mu: DiscreteMeasure, p: float, x, probe: FiniteDifferenceProbe) -> AtomEstimate:
    """Sequence of quotients converging to ``mu({x})`` as the step shrinks."""
    if p < 1:
        raise ValueError("atom recovery is stated for p >= 1")
    if probe.p != p:
        raise ValueError("probe exponent differs from p")
    h = probe.unit_direction
    est = tuple(peak_quotient(mu, p, x, s * h) for s in probe.steps)
    return AtomEstimate(probe.steps, est, convergence_order(probe.steps, est))


def convergence_order(steps, values) -> float:
    v = np.abs(np.asarray(values, dtype=float))
    s = np.asarray(steps, dtype=float)
    keep = v > 0
    if keep.sum() < 2:
        return math.inf
    return float(np.polyfit(np.log(s[keep]), np.log(v[keep]), 1)[0])


@dataclass(frozen=True)
class IdentificationReport:
    verdict: str  # "identified equal", "separated" or "indistinguishable"
    witness: tuple[float, ...] | None
    detail: str


def measure_identity_via_potentials(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float,
                                    grid, rng: np.random.Generator | None = None,
                                    tol: float = 1e-9) -> IdentificationReport:
    """Decide whether two measures agree using only their potential functions.

    For even ``p`` equal potentials do not determine the measure; if the
    potentials agree but the measures differ the verdict is "indistinguishable".
    """
    pts = [as_point(g) for g in grid] + list(mu.points) + list(nu.points)
    for g in pts:
        a, b = potential(mu, p, g), potential(nu, p, g)
        if abs(a - b) > tol * max(1.0, abs(a)):
            return IdentificationReport("separated", g, f"potentials {a:.12g} vs {b:.12g}")
    if is_even_integer(p):
        if mu == nu:
            return IdentificationReport("identified equal", None, "identical atoms")
        return IdentificationReport("indistinguishable", None,
                                    "potentials coincide on the grid yet the measures differ")
    rng = rng or np.random.default_rng(0)
    both = DiscreteMeasure([(pt, 0.5 * w) for pt, w in mu] + [(pt, 0.5 * w) for pt, w in nu], mu.space)
    probe = default_probe(both, p, rng)
    for pt in sorted(set(mu.points) | set(nu.points)):
        a = atom_mass_estimate(mu, p, pt, probe).estimates[-1]
        b = atom_mass_estimate(nu, p, pt, probe).estimates[-1]
        if abs(a - b) > 1e-3:
            return IdentificationReport("separated", pt, f"atom masses {a:.6g} vs {b:.6g}")
    return IdentificationReport("identified equal", None, "potentials and atom masses agree")


def second_directional_functional(mu: DiscreteMeasure, p: int, x) -> float:
    """``k E|y|^(2k-2) + 2k(k-1) E[<x,y>^2 |y|^(2k-4)]`` for ``p = 2k >= 4`` and unit ``x``."""
    k = _even_order(p)
    x = np.asarray(as_point(x))
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    Y = mu.coords()
    w = mu.weight_array()
    sq = np.einsum("ij,ij->i", Y, Y)
    inner = Y @ x
    return math.fsum(w * (k * sq ** (k - 1) + 2 * k * (k - 1) * inner ** 2 * sq ** (k - 2)))


def second_directional_difference(mu: DiscreteMeasure, p: int, x, t: float = 1e-4) -> float:
    """Difference-quotient form of the same functional at step ``t``.

    Uses the symmetric quotient ``(T(tx) + T(-tx) - 2 T(0)) / (2 t^2)``; the
    linear term cancels and the odd-order remainder drops out, leaving O(t^2).
    """
    _even_order(p)
    x = as_point(x)
    with mpmath.workdps(WORKING_DPS):
        t = mpmath.mpf(t)
        fwd = _potential_mp(mu, p, [t * c for c in x])
        bwd = _potential_mp(mu, p, [-t * c for c in x])
        mid = _potential_mp(mu, p, [0] * len(x))
        return float((fwd + bwd - 2 * mid) / (2 * t * t))


def _even_order(p) -> int:
    if not (is_even_integer(p) and p >= 4):
        raise ValueError("the second-derivative functional is defined for even p >= 4")
    return int(p) // 2


def zeta_measure(x, a: float, b: float, alpha: float, space=None) -> DiscreteMeasure:
    """``alpha delta_{ax} + (1 - alpha) delta_{bx}``."""
    x = np.asarray(as_point(x))
    return DiscreteMeasure([(a * x, alpha), (b * x, 1 - alpha)], space)


@dataclass(frozen=True)
class BisectorReport:
    interval: tuple[float, float]
    length: float
    direct_mass: float


def _bisector_inputs(mu, x, a, b):
    if not mu.space.is_euclidean:
        raise MeasureError("bisector recovery needs a Euclidean ground space")
    x = np.asarray(as_point(x))
    if not np.any(x):
        raise ValueError("x must be nonzero")
    if a == b:
        raise ValueError("a and b must differ")
    return x


def hyperplane_mass_via_bisector(mu: DiscreteMeasure, x, a: float, b: float, p: float,
                                 rel_tol: float = 1e-12) -> BisectorReport:
    """Length of the set of optimal ``alpha`` for ``alpha -> d(mu, zeta^alpha)``.

    The transport cost to ``zeta^alpha`` is convex piecewise linear in
    ``alpha`` with slope ``|ax - y|^p - |bx - y|^p`` on the block of atom ``y``
    once the atoms are sorted by that slope; the flat stretch is the mass of
    the atoms with zero slope.
    """
    x = _bisector_inputs(mu, x, a, b)
    Y = mu.coords()
    ca = np.linalg.norm(Y - a * x, axis=1) ** p
    cb = np.linalg.norm(Y - b * x, axis=1) ** p
    slope = ca - cb
    scale = np.maximum(np.maximum(ca, cb), 1e-300)
    flat = np.abs(slope) <= rel_tol * scale
    w = mu.weight_array()
    lo = math.fsum(w[(slope < 0) & ~flat])
    hi = lo + math.fsum(w[flat])
    return BisectorReport((lo, min(hi, 1.0)), min(hi, 1.0) - lo, bisector_mass(mu, a * x, b * x))


def bisector_mass(mu: DiscreteMeasure, u, v, rel_tol: float = 1e-12) -> float:
    """``mu`` mass of the hyperplane of points equidistant from ``u`` and ``v``."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    normal = u - v
    Y = mu.coords()
    offset = (Y - (u + v) / 2) @ normal
    scale = np.linalg.norm(normal) * np.maximum(np.linalg.norm(Y - (u + v) / 2, axis=1), 1.0)
    on = np.abs(offset) <= rel_tol * scale
    return math.fsum(mu.weight_array()[on])


def bisector_grid_scan(mu: DiscreteMeasure, x, a: float, b: float, p: float,
                       step: float = 1e-3, tol: float = 1e-9) -> float:
    """Grid oracle: length of the near-minimal ``alpha`` set, each value solved by LP."""
    x = _bisector_inputs(mu, x, a, b)
    alphas = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    costs = np.array([solve(mu, zeta_measure(x, a, b, al, mu.space), p).cost for al in alphas])
    best = costs.min()
    near = alphas[costs <= best + tol * max(1.0, abs(best))]
    return float(near.max() - near.min())
