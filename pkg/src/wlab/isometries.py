"""Isometries of Wasserstein spaces and a randomised verifier for them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .geometry import barycenter
from .measures import DiscreteMeasure, GroundSpace, MeasureError, dirac, euclidean, pushforward
from .onedim import flip, rehome, snowflake_space
from .sampling import random_measure
from .transport import solve

ORTHO_TOL = 1e-12


def _orthogonal(matrix) -> np.ndarray:
    Q = np.array(matrix, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("expected a square matrix")
    if np.abs(Q.T @ Q - np.eye(len(Q))).max() > ORTHO_TOL:
        raise ValueError("matrix is not orthogonal")
    Q.setflags(write=False)
    return Q


@dataclass(frozen=True, eq=False)
class Pushforward:
    """Push-forward of the affine isometry ``x -> Q x + v``."""

    Q: np.ndarray
    v: np.ndarray

    variant = "pushforward"

    def __post_init__(self) -> None:
        Q = _orthogonal(self.Q)
        v = np.array(self.v, dtype=float).reshape(len(Q))
        v.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "v", v)

    @classmethod
    def translation(cls, v) -> Pushforward:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        return cls(np.eye(len(v)), v)

    @property
    def dim(self) -> int:
        return len(self.v)

    def point_map(self, x) -> np.ndarray:
        return self.Q @ np.asarray(x, dtype=float) + self.v

    def apply(self, mu: DiscreteMeasure) -> DiscreteMeasure:
        _check_dim(mu, self.dim)
        return pushforward(mu, self.point_map)

    def compose(self, inner: Pushforward) -> Pushforward:
        """``self o inner``."""
        return Pushforward(self.Q @ inner.Q, self.Q @ inner.v + self.v)


@dataclass(frozen=True, eq=False)
class KloecknerRotation:
    """``mu -> (t_m o R o t_{-m})_# mu`` with ``m`` the barycenter of ``mu``."""

    R: np.ndarray

    variant = "kloeckner_rotation"

    def __post_init__(self) -> None:
        object.__setattr__(self, "R", _orthogonal(self.R))

    @property
    def dim(self) -> int:
        return len(self.R)

    def apply(self, mu: DiscreteMeasure) -> DiscreteMeasure:
        _check_dim(mu, self.dim)
        m = barycenter(mu)
        return pushforward(mu, lambda y: m + self.R @ (y - m))


@dataclass(frozen=True)
class Flip:
    """The quantile/distribution exchange on measures over [0, 1]."""

    variant = "flip"
    dim = 1

    def apply(self, mu: DiscreteMeasure) -> DiscreteMeasure:
        return flip(mu)


IsometryMap = Union[Pushforward, KloecknerRotation, Flip]


def _check_dim(mu: DiscreteMeasure, dim: int) -> None:
    if mu.dim != dim or mu.space.kind == "table":
        raise MeasureError(f"isometry acts on R^{dim}, measure lives on {mu.space.kind}({mu.dim})")


def apply(iso: IsometryMap, mu: DiscreteMeasure) -> DiscreteMeasure:
    return iso.apply(mu)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def verification_space(iso: IsometryMap, p: float) -> GroundSpace:
    """Ground space on which ``iso`` is tested at exponent ``p``."""
    if isinstance(iso, Flip):
        if p < 1:
            raise ValueError("flip is tested on the snowflake of [0, 1], which needs p >= 1")
        return snowflake_space(p)
    return euclidean(iso.dim)


def _sample_pair(iso: IsometryMap, space: GroundSpace, rng: np.random.Generator):
    lo, hi = (0.0, 1.0) if isinstance(iso, Flip) else (-1.0, 1.0)
    return random_measure(rng, space, low=lo, high=hi), random_measure(rng, space, low=lo, high=hi)


@dataclass(frozen=True)
class IsometryReport:
    variant: str
    p: float
    trials: int
    max_deviation: float
    violations: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"variant": self.variant, "p": self.p, "trials": self.trials,
                "max_deviation": self.max_deviation, "violations": list(self.violations)}


def verify_isometry(iso: IsometryMap, p: float, trials: int = 100, seed: int = 0,
                    tol: float = 1e-8, stop_on_violation: bool = False) -> IsometryReport:
    """Compare ``d(iso(mu), iso(nu))`` with ``d(mu, nu)`` on seeded random pairs.

    Trial ``i`` draws its pair from ``default_rng([seed, i])``, so any
    violation can be replayed from ``(seed, trial)`` alone.
    """
    space = verification_space(iso, p)
    worst = 0.0
    bad = []
    done = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        mu, nu = _sample_pair(iso, space, rng)
        before = solve(mu, nu, p).distance
        after = solve(iso.apply(mu), iso.apply(nu), p).distance
        dev = abs(after - before)
        worst = max(worst, dev)
        done = trial + 1
        if dev > tol:
            bad.append({"seed": seed, "trial": trial, "deviation": dev,
                        "mu": mu.to_json(), "nu": nu.to_json()})
            if stop_on_violation:
                break
    return IsometryReport(iso.variant, p, done, worst, tuple(bad))


@dataclass(frozen=True)
class DiracImageReport:
    preserves_diracs: bool
    witness: tuple | None = None  # (point, image measure)


def dirac_image_classifier(iso: IsometryMap, points, space: GroundSpace | None = None) -> DiracImageReport:
    """Apply ``iso`` to Dirac masses at the sample points and look for a split."""
    for x in points:
        img = iso.apply(dirac(x, space))
        if len(img) != 1:
            return DiracImageReport(False, (tuple(np.atleast_1d(x).astype(float)), img))
    return DiracImageReport(True)


def reflection_pushforward() -> Pushforward:
    """``x -> 1 - x`` on the line."""
    return Pushforward(np.array([[-1.0]]), np.array([1.0]))


@dataclass(frozen=True)
class _Composite:
    maps: tuple
    variant: str = "composite"
    dim: int = 1

    def apply(self, mu):
        for f in reversed(self.maps):
            mu = f.apply(mu)
        return mu


def mass_splitting_candidates() -> dict[str, _Composite]:
    """Mass-splitting maps on [0, 1] built from the flip and the reflection."""
    f, r = Flip(), reflection_pushforward()
    return {
        "flip": _Composite((f,)),
        "flip o reflect": _Composite((f, r)),
        "reflect o flip": _Composite((r, f)),
        "reflect o flip o reflect": _Composite((r, f, r)),
    }


@dataclass(frozen=True)
class SplittingSearchReport:
    verdict: str  # "no counterexample found" or "isometric candidate found"
    refuted: dict  # candidate name -> (trial, deviation) of the first violation
    survivors: tuple


def search_mass_splitting_isometry(q: float, trials: int = 200, seed: int = 0,
                                   tol: float = 1e-8) -> SplittingSearchReport:
    """Test each mass-splitting candidate as an isometry of W1 over ``([0,1], |x-y|^q)``.

    Finding no isometric candidate is reported as such, never as a proof.
    """
    space = GroundSpace("powered_euclidean", 1, q=q)
    refuted, survivors = {}, []
    for name, cand in mass_splitting_candidates().items():
        for trial in range(trials):
            rng = np.random.default_rng([seed, trial])
            mu = random_measure(rng, space, low=0.0, high=1.0)
            nu = random_measure(rng, space, low=0.0, high=1.0)
            fm, fn = rehome(cand.apply(mu), space), rehome(cand.apply(nu), space)
            dev = abs(solve(fm, fn, 1.0).distance - solve(mu, nu, 1.0).distance)
            if dev > tol:
                refuted[name] = (trial, dev)
                break
        else:
            survivors.append(name)
    verdict = "isometric candidate found" if survivors else "no counterexample found"
    return SplittingSearchReport(verdict, refuted, tuple(survivors))


def rotation_is_not_pushforward(R) -> tuple[DiscreteMeasure, DiscreteMeasure] | None:
    """Witness that the rotation is no push-forward: it fixes every Dirac mass
    (forcing the point map to be the identity) yet moves a two-point measure.

    Returns ``(mu, image)`` or ``None`` when ``R`` is the identity.
    """
    rot = KloecknerRotation(R)
    d = rot.dim
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        mu = DiscreteMeasure([(np.zeros(d), 0.5), (e, 0.5)])
        img = rot.apply(mu)
        if solve(mu, img, 2).distance > 1e-9:
            return mu, img
    return None
