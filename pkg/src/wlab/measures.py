"""Ground spaces, finitely supported measures and their lattice operations."""

from __future__ import annotations

import itertools
import json
import math
import numbers
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

Point = tuple[float, ...]

WEIGHT_SUM_TOL = 1e-12
INGEST_SUM_TOL = 1e-9


class MeasureError(ValueError):
    """Raised for malformed measures, points or ground spaces."""


def as_point(x: Any) -> Point:
    """Coerce a scalar or a sequence of coordinates into a point tuple."""
    if isinstance(x, numbers.Real):
        coords = (float(x),)
    else:
        coords = tuple(float(c) for c in x)
    if not coords:
        raise MeasureError("point must have at least one coordinate")
    if not all(math.isfinite(c) for c in coords):
        raise MeasureError(f"non-finite coordinate in {coords}")
    # -0.0 and 0.0 must hash to the same atom
    return tuple(c + 0.0 for c in coords)


@dataclass(frozen=True)
class GroundSpace:
    """Metric structure on points.

    ``euclidean``: the norm distance in R^dim.
    ``powered_euclidean``: ``||x - y|| ** q`` with ``0 < q <= 1`` (a snowflake
    for ``q < 1``).
    ``table``: an explicit symmetric distance table; points are ``(index,)``.
    """

    kind: str
    dim: int
    q: float = 1.0
    table: tuple[tuple[float, ...], ...] | None = field(default=None, repr=False)
    ultrametric: bool = False
    strict: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("euclidean", "powered_euclidean", "table"):
            raise MeasureError(f"unknown space kind {self.kind!r}")
        if self.dim < 1:
            raise MeasureError("dimension must be >= 1")
        if self.kind == "powered_euclidean" and not 0 < self.q <= 1:
            raise MeasureError("powered_euclidean exponent must satisfy 0 < q <= 1")
        if self.kind == "table":
            _validate_table(self.table, self.ultrametric, self.strict)

    @property
    def size(self) -> int | None:
        return len(self.table) if self.table is not None else None

    @property
    def is_euclidean(self) -> bool:
        return self.kind == "euclidean"

    @property
    def strict_triangle(self) -> bool:
        """Whether the metric satisfies the strict triangle inequality."""
        if self.kind == "powered_euclidean":
            return self.q < 1
        if self.kind == "table":
            return self.ultrametric or self.strict
        return False

    def check_point(self, x: Point) -> None:
        if len(x) != self.dim:
            raise MeasureError(f"point {x} has dimension {len(x)}, space has {self.dim}")
        if self.kind == "table":
            i = x[0]
            if i != int(i) or not 0 <= i < len(self.table):
                raise MeasureError(f"table index {i} out of range")

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "dim": self.dim}
        if self.kind == "powered_euclidean":
            out["q"] = self.q
        if self.kind == "table":
            out["table"] = [list(row) for row in self.table]
            if self.ultrametric:
                out["ultrametric"] = True
            if self.strict:
                out["strict"] = True
        return out

    @classmethod
    def from_json(cls, data: dict) -> GroundSpace:
        kind = data.get("kind")
        if kind == "euclidean":
            return euclidean(int(data.get("dim", 1)))
        if kind == "powered_euclidean":
            return powered_euclidean(int(data.get("dim", 1)), float(data["q"]))
        if kind == "table":
            return table_space(
                data["table"],
                ultrametric=bool(data.get("ultrametric", False)),
                strict=bool(data.get("strict", False)),
            )
        raise MeasureError(f"unknown space kind {kind!r}")


def _validate_table(table, ultrametric: bool, strict: bool) -> None:
    if table is None:
        raise MeasureError("table space needs a distance table")
    arr = np.asarray(table, dtype=float)
    n = arr.shape[0]
    if arr.ndim != 2 or arr.shape != (n, n) or n == 0:
        raise MeasureError("distance table must be a non-empty square matrix")
    if not np.all(np.isfinite(arr)):
        raise MeasureError("distance table has non-finite entries")
    if not np.array_equal(arr, arr.T):
        raise MeasureError("distance table must be symmetric")
    off = ~np.eye(n, dtype=bool)
    if np.any(np.diag(arr) != 0) or np.any(arr[off] <= 0):
        raise MeasureError("distance must vanish exactly on the diagonal")
    for x, y, z in itertools.permutations(range(n), 3):
        if arr[x, y] > arr[x, z] + arr[z, y] + 1e-12:
            raise MeasureError(f"triangle inequality fails at {(x, z, y)}")
        if strict and not arr[x, y] < arr[x, z] + arr[z, y]:
            raise MeasureError(f"strict triangle inequality fails at {(x, z, y)}")
        if ultrametric and arr[x, z] > max(arr[x, y], arr[y, z]) + 1e-12:
            raise MeasureError(f"ultrametric inequality fails at {(x, y, z)}")


def euclidean(dim: int = 1) -> GroundSpace:
    return GroundSpace("euclidean", dim)


def powered_euclidean(dim: int, q: float) -> GroundSpace:
    return GroundSpace("powered_euclidean", dim, q=float(q))


def table_space(table: Sequence[Sequence[float]], ultrametric: bool = False,
                strict: bool = False) -> GroundSpace:
    rows = tuple(tuple(float(v) for v in row) for row in table)
    return GroundSpace("table", 1, table=rows, ultrametric=ultrametric, strict=strict)


def distance(space: GroundSpace, x: Any, y: Any) -> float:
    """Ground distance between two points of ``space``."""
    x, y = as_point(x), as_point(y)
    space.check_point(x)
    space.check_point(y)
    if space.kind == "table":
        return space.table[int(x[0])][int(y[0])]
    r = math.dist(x, y)
    if space.kind == "powered_euclidean" and space.q != 1:
        return r ** space.q
    return r


def cost_matrix(space: GroundSpace, xs: Sequence[Point], ys: Sequence[Point],
                p: float) -> np.ndarray:
    """Matrix of ``distance(x, y) ** p`` over ``xs`` x ``ys``."""
    if p <= 0:
        raise MeasureError("exponent p must be positive")
    if space.kind == "table":
        tab = np.asarray(space.table)
        rho = tab[np.ix_([int(x[0]) for x in xs], [int(y[0]) for y in ys])]
        return _power(rho, p)
    X = np.asarray(xs, dtype=float).reshape(len(xs), space.dim)
    Y = np.asarray(ys, dtype=float).reshape(len(ys), space.dim)
    diff = X[:, None, :] - Y[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    if space.kind == "euclidean":
        if float(p).is_integer() and int(p) % 2 == 0:
            # even exponents straight from squared norms, no sqrt round-off
            return sq ** (int(p) // 2)
        return _power(np.sqrt(sq), p)
    rho = np.sqrt(sq) ** space.q if space.q != 1 else np.sqrt(sq)
    return _power(rho, p)


def _power(a: np.ndarray, p: float) -> np.ndarray:
    if float(p).is_integer():
        return a ** int(p)
    return np.where(a > 0, np.exp(p * np.log(np.where(a > 0, a, 1.0))), 0.0)


class WeightedAtoms:
    """Immutable nonnegative finitely supported measure of arbitrary mass.

    Atoms are merged, zero weights dropped and points sorted, so two equal
    measures always have identical ``points`` and ``weights``.
    """

    __slots__ = ("points", "weights", "space")

    def __init__(self, atoms: Iterable[tuple[Any, float]] = (), space: GroundSpace | None = None):
        merged: dict[Point, float] = {}
        for pt, w in atoms:
            pt = as_point(pt)
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise MeasureError(f"weights must be finite and nonnegative, got {w}")
            merged[pt] = merged.get(pt, 0.0) + w
        items = sorted((pt, w) for pt, w in merged.items() if w > 0)
        if space is None:
            dim = len(items[0][0]) if items else 1
            space = euclidean(dim)
        for pt, _ in items:
            space.check_point(pt)
        object.__setattr__(self, "points", tuple(pt for pt, _ in items))
        object.__setattr__(self, "weights", tuple(w for _, w in items))
        object.__setattr__(self, "space", space)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.weights))

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedAtoms):
            return NotImplemented
        return (self.points, self.weights, self.space) == (other.points, other.weights, other.space)

    def __hash__(self) -> int:
        return hash((self.points, self.weights))

    def __repr__(self) -> str:
        body = ", ".join(f"{_fmt_point(pt)}: {w:.6g}" for pt, w in self)
        return f"{type(self).__name__}({{{body}}})"

    @property
    def mass(self) -> float:
        return math.fsum(self.weights)

    @property
    def dim(self) -> int:
        return self.space.dim

    def weight_of(self, x: Any) -> float:
        x = as_point(x)
        for pt, w in self:
            if pt == x:
                return w
        return 0.0

    def as_dict(self) -> dict[Point, float]:
        return dict(zip(self.points, self.weights))

    def coords(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(len(self), self.dim)

    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def isclose(self, other: WeightedAtoms, atol: float = 1e-12) -> bool:
        """Same support and weights agreeing within ``atol``."""
        if self.points != other.points:
            return False
        return all(abs(a - b) <= atol for a, b in zip(self.weights, other.weights))

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "atoms": [{"point": list(pt), "weight": w} for pt, w in self],
        }


class DiscreteMeasure(WeightedAtoms):
    """Finitely supported probability measure on a ground space."""

    __slots__ = ()

    def __init__(self, atoms: Iterable[tuple[Any, float]], space: GroundSpace | None = None):
        super().__init__(atoms, space)
        if not self.points:
            raise MeasureError("a probability measure needs at least one atom")
        if abs(self.mass - 1.0) > WEIGHT_SUM_TOL:
            raise MeasureError(f"weights sum to {self.mass!r}, expected 1")

    @classmethod
    def from_json(cls, data: dict | str) -> DiscreteMeasure:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            space = GroundSpace.from_json(data.get("space", {"kind": "euclidean", "dim": 1}))
            atoms = [(a["point"], a["weight"]) for a in data["atoms"]]
        except (KeyError, TypeError) as exc:
            raise MeasureError(f"malformed measure JSON: {exc}") from exc
        total = math.fsum(float(w) for _, w in atoms)
        if abs(total - 1.0) > INGEST_SUM_TOL:
            raise MeasureError(f"weights sum to {total!r}, expected 1 +- {INGEST_SUM_TOL}")
        return normalize(atoms, space)


def dirac(x: Any, space: GroundSpace | None = None) -> DiscreteMeasure:
    return DiscreteMeasure([(x, 1.0)], space)


def normalize(atoms: Iterable[tuple[Any, float]], space: GroundSpace | None = None) -> DiscreteMeasure:
    """Merge duplicates, drop zero weights and rescale to total mass one."""
    raw = WeightedAtoms(atoms, space)
    total = raw.mass
    if not raw.points or total <= 0:
        raise MeasureError("cannot normalize an empty or zero-mass atom list")
    weights = [w / total for w in raw.weights]
    # push the rounding residue onto the heaviest atom
    i = max(range(len(weights)), key=weights.__getitem__)
    weights[i] += 1.0 - math.fsum(weights)
    return DiscreteMeasure(zip(raw.points, weights), raw.space)


def mixture(mu: DiscreteMeasure, nu: DiscreteMeasure, lam: float) -> DiscreteMeasure:
    """``(1 - lam) * mu + lam * nu``."""
    _same_space(mu, nu)
    atoms = [(pt, (1 - lam) * w) for pt, w in mu] + [(pt, lam * w) for pt, w in nu]
    return normalize(atoms, mu.space)


@dataclass(frozen=True)
class SignedDecomposition:
    """``mu = meet + plus`` and ``nu = meet + minus`` with ``meet = mu ^ nu``."""

    meet: WeightedAtoms
    plus: WeightedAtoms
    minus: WeightedAtoms

    def to_json(self) -> dict:
        def atoms(a: WeightedAtoms):
            return [{"point": list(pt), "weight": w} for pt, w in a]

        return {
            "space": self.meet.space.to_json(),
            "meet": atoms(self.meet),
            "plus": atoms(self.plus),
            "minus": atoms(self.minus),
        }


def lattice_decompose(mu: WeightedAtoms, nu: WeightedAtoms) -> SignedDecomposition:
    """Atom-wise minimum of two measures and the positive/negative residuals."""
    _same_space(mu, nu)
    a, b = mu.as_dict(), nu.as_dict()
    meet, plus, minus = [], [], []
    for pt in sorted(set(a) | set(b)):
        wa, wb = a.get(pt, 0.0), b.get(pt, 0.0)
        m = min(wa, wb)
        meet.append((pt, m))
        plus.append((pt, wa - m))
        minus.append((pt, wb - m))
    space = mu.space
    return SignedDecomposition(WeightedAtoms(meet, space), WeightedAtoms(plus, space),
                               WeightedAtoms(minus, space))


def pushforward(mu: DiscreteMeasure, f) -> DiscreteMeasure:
    """Image measure of ``mu`` under the point map ``f`` (atoms merged)."""
    return DiscreteMeasure([(f(np.asarray(pt)), w) for pt, w in mu], mu.space)


def _same_space(mu: WeightedAtoms, nu: WeightedAtoms) -> None:
    if mu.space != nu.space:
        raise MeasureError("measures live on different ground spaces")


def _fmt_point(pt: Point) -> str:
    inner = ", ".join(f"{c:g}" for c in pt)
    return f"({inner})" if len(pt) > 1 else inner
