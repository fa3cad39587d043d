"""Seeded generators for random measures and metric spaces."""

from __future__ import annotations

import zlib

import numpy as np

from .measures import DiscreteMeasure, GroundSpace, normalize, table_space


def stream(seed: int, label: str, trial: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, label, trial)``, stable across runs."""
    return np.random.default_rng([seed, zlib.crc32(label.encode()), trial])


def random_measure(rng: np.random.Generator, space: GroundSpace, max_atoms: int = 6,
                   low: float = -1.0, high: float = 1.0, min_atoms: int = 1) -> DiscreteMeasure:
    """Atom count uniform in ``min_atoms..max_atoms``, points uniform in a
    box, weights from the flat Dirichlet distribution."""
    n = int(rng.integers(min_atoms, max_atoms + 1))
    pts = rng.uniform(low, high, size=(n, space.dim))
    w = rng.dirichlet(np.ones(n))
    return normalize(zip(pts, w), space)


def measure_on(rng: np.random.Generator, points, space: GroundSpace) -> DiscreteMeasure:
    """Flat-Dirichlet weights on the given support."""
    w = rng.dirichlet(np.ones(len(points)))
    return normalize(zip(points, w), space)


def dyadic_measure(rng: np.random.Generator, max_atoms: int = 6, bits: int = 10,
                   space: GroundSpace | None = None) -> DiscreteMeasure:
    """Measure on [0, 1] whose points and weights are multiples of ``2**-bits``,
    so every CDF/quantile manipulation is exact in floating point."""
    scale = 2 ** bits
    n = int(rng.integers(1, max_atoms + 1))
    pts = rng.choice(scale + 1, size=n, replace=False) / scale
    cuts = np.sort(rng.choice(np.arange(1, scale), size=n - 1, replace=False))
    w = np.diff(np.concatenate([[0], cuts, [scale]])) / scale
    return DiscreteMeasure(zip(pts, w), space)


def random_ultrametric(rng: np.random.Generator, n: int) -> GroundSpace:
    """Ultrametric table from random agglomerative merging at increasing heights."""
    clusters = [[i] for i in range(n)]
    table = np.zeros((n, n))
    height = 0.0
    while len(clusters) > 1:
        height += rng.uniform(0.1, 1.0)
        a, b = sorted(rng.choice(len(clusters), size=2, replace=False))
        for i in clusters[a]:
            for j in clusters[b]:
                table[i, j] = table[j, i] = height
        clusters[a] = clusters[a] + clusters.pop(b)
    return table_space(table, ultrametric=True)


def separated_points(rng: np.random.Generator, n: int, dim: int, low: float, high: float,
                     min_gap: float, max_tries: int = 10_000) -> np.ndarray:
    """Rejection-sample ``n`` points in a box with pairwise gaps at least ``min_gap``."""
    pts: list[np.ndarray] = []
    for _ in range(max_tries):
        cand = rng.uniform(low, high, size=dim)
        if all(np.linalg.norm(cand - q) >= min_gap for q in pts):
            pts.append(cand)
            if len(pts) == n:
                return np.array(pts)
    raise RuntimeError("could not place separated points; enlarge the box")
