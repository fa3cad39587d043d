"""Distribution and quantile functions of measures on [0, 1], the W1 closed
form, and the flip map that exchanges the two."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import DiscreteMeasure, GroundSpace, MeasureError, euclidean, powered_euclidean
from .transport import solve


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous nondecreasing step function on [0, 1].

    Takes ``values[i]`` on ``[breakpoints[i], breakpoints[i + 1])`` and the
    last value from the last breakpoint through 1 inclusive. The first
    breakpoint is always 0 and consecutive values are distinct.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        b, v = self.breakpoints, self.values
        if len(b) != len(v) or not b:
            raise ValueError("breakpoints and values must be non-empty and of equal length")
        if b[0] != 0.0 or any(x >= y for x, y in zip(b, b[1:])) or b[-1] > 1.0:
            raise ValueError(f"breakpoints must increase from 0 within [0, 1]: {b}")
        if any(x >= y for x, y in zip(v, v[1:])):
            raise ValueError(f"levels must strictly increase: {v}")

    @classmethod
    def from_pieces(cls, pieces) -> StepFunction:
        """Build from ``(start, level)`` pairs, dropping repeated levels."""
        b, v = [], []
        for start, level in pieces:
            if b and start == b[-1]:
                v[-1] = level
                if len(v) > 1 and v[-2] == level:
                    b.pop()
                    v.pop()
            elif not v or level != v[-1]:
                b.append(float(start))
                v.append(float(level))
        return cls(tuple(b), tuple(v))

    def __call__(self, x: float) -> float:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"{x} outside [0, 1]")
        i = int(np.searchsorted(self.breakpoints, x, side="right")) - 1
        return self.values[i]

    def pieces(self) -> list[tuple[float, float, float]]:
        """``(start, end, level)`` triples covering [0, 1]."""
        ends = self.breakpoints[1:] + (1.0,)
        return list(zip(self.breakpoints, ends, self.values))


def _check_unit_support(mu: DiscreteMeasure) -> None:
    if mu.dim != 1 or mu.space.kind == "table":
        raise MeasureError("one-dimensional machinery needs measures on the real line")
    lo, hi = mu.points[0][0], mu.points[-1][0]
    if lo < 0.0 or hi > 1.0:
        raise MeasureError(f"support [{lo}, {hi}] not inside [0, 1]")


def cdf(mu: DiscreteMeasure) -> StepFunction:
    """``x -> mu([0, x])``."""
    _check_unit_support(mu)
    pieces = [(0.0, 0.0)]
    acc = []
    for (x,), w in mu:
        acc.append(w)
        pieces.append((x, math.fsum(acc)))
    # the final level is 1 by definition, not by floating summation
    pieces[-1] = (pieces[-1][0], 1.0)
    return StepFunction.from_pieces(pieces)


def quantile(F: StepFunction) -> StepFunction:
    """Generalised inverse ``y -> sup{x : F(x) <= y}`` with value 1 at 1.

    ``F`` is extended by 0 left of 0 and by 1 right of 1; ``F(1)`` must be 1.
    """
    if F.values[-1] != 1.0:
        raise ValueError("quantile needs a distribution function reaching 1")
    pieces = []
    lower = 0.0
    for start, level in zip(F.breakpoints, F.values):
        # on [lower, level) the first breakpoint with F > y is this one
        if level > lower:
            pieces.append((lower, start))
            lower = level
    if pieces[-1][1] != 1.0:
        pieces.append((1.0, 1.0))
    return StepFunction.from_pieces(pieces)


def measure_from_cdf(F: StepFunction, space: GroundSpace | None = None) -> DiscreteMeasure:
    """The measure on [0, 1] whose distribution function is ``F``."""
    if F.values[-1] != 1.0:
        raise ValueError("not a distribution function: final level differs from 1")
    atoms = []
    prev = 0.0
    for start, level in zip(F.breakpoints, F.values):
        atoms.append((start, level - prev))
        prev = level
    return DiscreteMeasure(atoms, space or euclidean(1))


def flip(mu: DiscreteMeasure) -> DiscreteMeasure:
    """The measure whose distribution function is the quantile function of ``mu``."""
    return measure_from_cdf(quantile(cdf(mu)), mu.space)


def l1_distance(F: StepFunction, G: StepFunction) -> float:
    """``int_0^1 |F - G|`` computed exactly piece by piece."""
    grid = sorted(set(F.breakpoints) | set(G.breakpoints) | {1.0})
    terms = []
    for a, b in zip(grid, grid[1:]):
        terms.append(abs(F(a) - G(a)) * (b - a))
    return math.fsum(terms)


def vallender_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """W1 distance on [0, 1] as the L1 distance of the distribution functions."""
    return l1_distance(cdf(mu), cdf(nu))


def rehome(mu: DiscreteMeasure, space: GroundSpace) -> DiscreteMeasure:
    """The same atoms regarded as a measure on another ground space."""
    return DiscreteMeasure(zip(mu.points, mu.weights), space)


def snowflake_space(p: float) -> GroundSpace:
    """[0, 1] with the metric ``|x - y| ** (1/p)``."""
    return powered_euclidean(1, 1.0 / p)


@dataclass(frozen=True)
class SnowflakeReport:
    ok: bool
    transport_cost: float
    closed_form: float
    deviation: float


def snowflake_check(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float,
                    tol: float = 1e-10) -> SnowflakeReport:
    """Compare the p-th power of the W_p distance over ``|x - y| ** (1/p)``
    with the W1 distance over the usual metric on [0, 1]."""
    if p < 1:
        raise ValueError("snowflake identity needs p >= 1")
    sp = snowflake_space(p)
    cost = solve(rehome(mu, sp), rehome(nu, sp), p).cost
    closed = vallender_distance(rehome(mu, euclidean(1)), rehome(nu, euclidean(1)))
    dev = abs(cost - closed)
    return SnowflakeReport(dev <= tol, cost, closed, dev)
