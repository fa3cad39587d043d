"""Exact optimal transport between finitely supported measures.

The solver is a transportation simplex (network simplex on the complete
bipartite graph) started from the north-west corner rule and pivoting with
Bland's rule. The brute-force oracle enumerates every basic feasible solution
of the transportation polytope by walking all spanning trees of the bipartite
graph, so it shares no code path with the simplex.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .measures import DiscreteMeasure, MeasureError, cost_matrix, lattice_decompose

MARGINAL_TOL = 1e-12
BRUTE_FORCE_MAX_CELLS = 16
SUPPORT_TOL = 1e-14


class TransportError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Nonnegative mass table with rows indexed by ``source`` atoms and columns
    by ``target`` atoms."""

    source: DiscreteMeasure
    target: DiscreteMeasure
    mass: np.ndarray

    def __post_init__(self) -> None:
        mass = np.array(self.mass, dtype=float)
        if mass.shape != (len(self.source), len(self.target)):
            raise TransportError(
                f"mass table has shape {mass.shape}, expected {(len(self.source), len(self.target))}")
        if self.source.space != self.target.space:
            raise TransportError("source and target live on different spaces")
        if np.any(mass < 0):
            raise TransportError("transport plan has negative mass")
        rows = np.abs(mass.sum(axis=1) - self.source.weight_array()).max()
        cols = np.abs(mass.sum(axis=0) - self.target.weight_array()).max()
        if max(rows, cols) > MARGINAL_TOL:
            raise TransportError(f"plan marginals off by {max(rows, cols):.3g}")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @property
    def space(self):
        return self.source.space

    def support(self, tol: float = SUPPORT_TOL) -> list[tuple[int, int]]:
        return [tuple(ij) for ij in np.argwhere(self.mass > tol)]

    def is_deterministic(self, tol: float = SUPPORT_TOL) -> bool:
        """Whether every source atom is sent to a single target atom."""
        return bool(np.all((self.mass > tol).sum(axis=1) == 1))

    def transposed(self) -> TransportPlan:
        return TransportPlan(self.target, self.source, self.mass.T)

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "mass": self.mass.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> TransportPlan:
        return cls(DiscreteMeasure.from_json(data["source"]),
                   DiscreteMeasure.from_json(data["target"]), np.asarray(data["mass"], dtype=float))


@dataclass(frozen=True, eq=False)
class OTResult:
    cost: float
    distance: float
    plan: TransportPlan
    p: float
    # filled by brute_force_solve only: every optimal vertex of the polytope
    optimal_plans: tuple[TransportPlan, ...] = field(default=(), repr=False)


def distance_from_cost(cost: float, p: float) -> float:
    """Apply the ``min(1/p, 1)`` exponent that turns a transport cost into a distance."""
    cost = max(cost, 0.0)
    return cost ** (1.0 / p) if p >= 1 else cost


def plan_cost(plan: TransportPlan, p: float) -> float:
    C = cost_matrix(plan.space, plan.source.points, plan.target.points, p)
    return math.fsum((C * plan.mass).ravel())


def solve(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> OTResult:
    """Optimal transport between ``mu`` and ``nu`` for the cost ``rho ** p``."""
    if p <= 0:
        raise TransportError("exponent p must be positive")
    if mu.space != nu.space:
        raise TransportError("measures live on different ground spaces")
    if (nu.points, nu.weights) < (mu.points, mu.weights):
        # one canonical orientation makes d(mu, nu) and d(nu, mu) bitwise equal
        res = solve(nu, mu, p)
        return OTResult(res.cost, res.distance, res.plan.transposed(), p)
    C = cost_matrix(mu.space, mu.points, nu.points, p)
    mass = transportation_simplex(mu.weight_array(), nu.weight_array(), C)
    plan = TransportPlan(mu, nu, mass)
    cost = math.fsum((C * plan.mass).ravel())
    return OTResult(cost, distance_from_cost(cost, p), plan, p)


def wasserstein(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> float:
    return solve(mu, nu, p).distance


def northwest_corner(a, b) -> dict[tuple[int, int], float]:
    """Initial basic feasible solution with exactly ``m + n - 1`` basic cells."""
    m, n = len(a), len(b)
    ra, rb = [float(x) for x in a], [float(x) for x in b]
    basis: dict[tuple[int, int], float] = {}
    i = j = 0
    while True:
        x = min(ra[i], rb[j])
        basis[i, j] = x
        ra[i] -= x
        rb[j] -= x
        if i == m - 1 and j == n - 1:
            return basis
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1


def transportation_simplex(a, b, C, max_iter: int | None = None) -> np.ndarray:
    """Minimise ``<C, X>`` over couplings ``X`` of the weight vectors ``a``, ``b``.

    Entering cell: the lowest row-major index with negative reduced cost.
    Leaving cell: the lowest index among the minimum-flow cells of the cycle.
    """
    C = np.asarray(C, dtype=float)
    m, n = C.shape
    basis = northwest_corner(a, b)
    tol = 1e-12 * max(1.0, float(np.abs(C).max(initial=0.0)))
    if max_iter is None:
        max_iter = 50 * (m + n) * max(m, n) + 1000
    for _ in range(max_iter):
        adj: list[list[int]] = [[] for _ in range(m + n)]
        for i, j in basis:
            adj[i].append(m + j)
            adj[m + j].append(i)
        u, v = _potentials(adj, C, m, n)
        R = C - u[:, None] - v[None, :]
        for cell in basis:
            R[cell] = 0.0
        neg = np.flatnonzero(R.ravel() < -tol)
        if neg.size == 0:
            break
        ei, ej = divmod(int(neg[0]), n)
        path = _tree_path(adj, m + ej, ei)
        # path runs col ej -> ... -> row ei; its edges alternate -, +, -, ...
        cells = []
        for s, t in zip(path, path[1:]):
            cells.append((s, t - m) if s < m else (t, s - m))
        minus = cells[0::2]
        theta = min(basis[c] for c in minus)
        leave = min((c for c in minus if basis[c] == theta), key=lambda c: c[0] * n + c[1])
        for k, c in enumerate(cells):
            basis[c] += theta if k % 2 else -theta
        del basis[leave]
        basis[ei, ej] = theta
    else:
        raise TransportError("transportation simplex did not converge")
    X = np.zeros((m, n))
    for (i, j), x in basis.items():
        X[i, j] = max(x, 0.0)
    return X


def _potentials(adj, C, m, n):
    u = np.zeros(m)
    v = np.zeros(n)
    seen = [False] * (m + n)
    seen[0] = True
    stack = [0]
    while stack:
        node = stack.pop()
        for nb in adj[node]:
            if seen[nb]:
                continue
            seen[nb] = True
            if node < m:
                v[nb - m] = C[node, nb - m] - u[node]
            else:
                u[nb] = C[nb, node - m] - v[node - m]
            stack.append(nb)
    return u, v


def _tree_path(adj, start: int, goal: int) -> list[int]:
    parent = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for nb in adj[node]:
            if nb not in parent:
                parent[nb] = node
                stack.append(nb)
    path = [goal]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


# --- brute-force oracle -----------------------------------------------------

class _TreeFamily(NamedTuple):
    cells: np.ndarray   # (trees, m+n-1) flat cell indices
    solve: np.ndarray   # (trees, m+n-1, m+n) maps marginals to tree flows


@functools.lru_cache(maxsize=None)
def _spanning_trees(m: int, n: int) -> _TreeFamily:
    """All spanning trees of K_{m,n} with the linear maps marginals -> flows."""
    size = m + n - 1
    trees: list[tuple[int, ...]] = []

    def find(parent, x):
        while parent[x] != x:
            x = parent[x]
        return x

    def extend(start: int, chosen: list[int], parent: list[int]) -> None:
        if len(chosen) == size:
            trees.append(tuple(chosen))
            return
        for cell in range(start, m * n):
            if m * n - cell < size - len(chosen):
                return
            i, j = divmod(cell, n)
            ri, rj = find(parent, i), find(parent, m + j)
            if ri == rj:
                continue
            child = list(parent)
            child[ri] = rj
            chosen.append(cell)
            extend(cell + 1, chosen, child)
            chosen.pop()

    extend(0, [], list(range(m + n)))
    incidence = np.zeros((m + n, m * n))
    for cell in range(m * n):
        i, j = divmod(cell, n)
        incidence[i, cell] = 1.0
        incidence[m + j, cell] = 1.0
    cells = np.array(trees, dtype=int).reshape(len(trees), size)
    solve = np.stack([np.linalg.pinv(incidence[:, t]) for t in cells])
    return _TreeFamily(cells, solve)


def enumerate_vertices(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list[TransportPlan]:
    """Every vertex of the transportation polytope of (mu, nu), deduplicated."""
    return [TransportPlan(mu, nu, X) for X in _vertex_tables(mu, nu)]


def _vertex_tables(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list[np.ndarray]:
    m, n = len(mu), len(nu)
    if m * n > BRUTE_FORCE_MAX_CELLS:
        raise TransportError(f"brute force limited to {BRUTE_FORCE_MAX_CELLS} cells, got {m}x{n}")
    if mu.space != nu.space:
        raise TransportError("measures live on different ground spaces")
    fam = _spanning_trees(m, n)
    rhs = np.concatenate([mu.weight_array(), nu.weight_array()])
    flows = fam.solve @ rhs
    feasible = np.all(flows >= -1e-13, axis=1)
    seen = set()
    tables = []
    for cells, x in zip(fam.cells[feasible], flows[feasible]):
        X = np.zeros(m * n)
        X[cells] = np.clip(x, 0.0, None)
        X = X.reshape(m, n)
        key = tuple(np.round(X, 12).ravel())
        if key not in seen:
            seen.add(key)
            tables.append(X)
    return tables


def brute_force_solve(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float,
                      tie_tol: float = 1e-10) -> OTResult:
    """Exact minimum by enumerating all basic feasible solutions.

    ``optimal_plans`` lists every vertex whose cost is within ``tie_tol`` of
    the minimum.
    """
    if p <= 0:
        raise TransportError("exponent p must be positive")
    C = cost_matrix(mu.space, mu.points, nu.points, p)
    tables = _vertex_tables(mu, nu)
    costs = [math.fsum((C * X).ravel()) for X in tables]
    best = min(costs)
    optimal = tuple(TransportPlan(mu, nu, X) for X, c in zip(tables, costs) if c <= best + tie_tol)
    k = costs.index(best)
    return OTResult(best, distance_from_cost(best, p), TransportPlan(mu, nu, tables[k]), p, optimal)


# --- plan manipulation and diagnostics ----------------------------------------

def diagonal_plan(mu: DiscreteMeasure) -> TransportPlan:
    return TransportPlan(mu, mu, np.diag(mu.weight_array()))


def glue(pi12: TransportPlan, pi23: TransportPlan) -> TransportPlan:
    """Compose two plans through their common middle marginal."""
    mid_a, mid_b = pi12.target, pi23.source
    if mid_a.points != mid_b.points or mid_a.space != mid_b.space or not mid_a.isclose(mid_b, MARGINAL_TOL):
        raise TransportError("middle marginals of the plans differ")
    w = mid_a.weight_array()
    mass = (pi12.mass / w[None, :]) @ pi23.mass
    return TransportPlan(pi12.source, pi23.target, mass)


@dataclass(frozen=True)
class MonotonicityReport:
    monotone: bool
    violations: tuple[tuple[tuple[int, int], tuple[int, int], float], ...]


def check_c_monotone(plan: TransportPlan, p: float, tol: float = 1e-12) -> MonotonicityReport:
    """Pairwise c-monotonicity of the plan support for the cost ``rho ** p``.

    Each violation is ``((i1, j1), (i2, j2), excess)`` where swapping partners
    would lower the cost by ``excess``.
    """
    C = cost_matrix(plan.space, plan.source.points, plan.target.points, p)
    supp = plan.support()
    scale = tol * max(1.0, float(np.abs(C).max(initial=0.0)))
    bad = []
    for (i1, j1), (i2, j2) in itertools.combinations(supp, 2):
        excess = C[i1, j1] + C[i2, j2] - C[i1, j2] - C[i2, j1]
        if excess > scale:
            bad.append(((i1, j1), (i2, j2), float(excess)))
    return MonotonicityReport(not bad, tuple(bad))


@dataclass(frozen=True)
class DiagonalReport:
    ok: bool
    max_deviation: float
    offending: tuple = ()


def diagonal_mass_check(mu: DiscreteMeasure, nu: DiscreteMeasure,
                        plan: TransportPlan | None = None, tol: float = 1e-10) -> DiagonalReport:
    """Check that an optimal plan keeps the shared mass ``mu ^ nu`` in place.

    Only meaningful on strict-triangle spaces with the cost ``rho`` itself
    (exponent one); the plan defaults to the solver's optimum.
    """
    if not mu.space.strict_triangle:
        raise MeasureError("diagonal mass check needs a space with the strict triangle inequality")
    if plan is None:
        plan = solve(mu, nu, 1.0).plan
    dec = lattice_decompose(mu, nu)
    col = {pt: j for j, pt in enumerate(plan.target.points)}
    diag = np.zeros(len(plan.source))
    for i, pt in enumerate(plan.source.points):
        if pt in col:
            diag[i] = plan.mass[i, col[pt]]
    off = plan.mass.copy()
    for i, pt in enumerate(plan.source.points):
        if pt in col:
            off[i, col[pt]] = 0.0
    offending = []
    worst = 0.0
    checks = [
        (plan.source.points, diag, dec.meet, "meet"),
        (plan.source.points, off.sum(axis=1), dec.plus, "plus"),
        (plan.target.points, off.sum(axis=0), dec.minus, "minus"),
    ]
    for pts, got, expected, label in checks:
        for pt, g in zip(pts, got):
            dev = abs(g - expected.weight_of(pt))
            worst = max(worst, dev)
            if dev > tol:
                offending.append((label, pt, float(g), expected.weight_of(pt)))
    return DiagonalReport(not offending, worst, tuple(offending))
