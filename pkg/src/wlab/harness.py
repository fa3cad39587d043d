"""Named verification suites with reproducible machine-readable reports.

Each suite is a function ``(seed, budget, solver) -> SuiteReport``. Trial
inputs come from ``sampling.stream(seed, suite_name, trial)``, so a suite's
result does not depend on which other suites ran or in what order.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import analysis, geometry, isometries, onedim, transport
from .measures import DiscreteMeasure, dirac, distance, euclidean, normalize, powered_euclidean
from .sampling import (dyadic_measure, measure_on, random_measure, random_ultrametric,
                       separated_points, stream)

Solver = Callable[[DiscreteMeasure, DiscreteMeasure, float], transport.OTResult]


@dataclass
class SuiteReport:
    suite: str
    anchor: str
    trials: int = 0
    passes: int = 0
    failures: list = field(default_factory=list)
    max_deviation: float = 0.0
    wall_time: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.trials > 0

    def record(self, passed: bool, deviation: float = 0.0, **replay) -> None:
        self.trials += 1
        if deviation == deviation:  # skip NaN
            self.max_deviation = max(self.max_deviation, float(deviation))
        if passed:
            self.passes += 1
        else:
            self.failures.append(_jsonable(replay))

    def to_dict(self, with_time: bool = True) -> dict:
        out = asdict(self)
        out["ok"] = self.ok
        if not with_time:
            out.pop("wall_time")
        return out

    def to_json(self, with_time: bool = True) -> str:
        return json.dumps(self.to_dict(with_time), sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "to_json") and not isinstance(obj, SuiteReport):
        return obj.to_json()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# every statement the toolkit promises to check numerically
IN_SCOPE_STATEMENTS = frozenset({
    "Wasserstein distance with exponent min(1/p, 1)",
    "Vallender's formula",
    "flip isometry",
    "snowflake example",
    "geodesics via plan push-forward",
    "Dirac geodesic rays",
    "non-optimal antipodal plan",
    "potential function",
    "atom recovery limit",
    "alternating binomial identities",
    "nonvanishing denominator",
    "barycenter",
    "translation identity",
    "orthogonality criterion",
    "barycentric rotation isometry",
    "two-point measures and bisector mass",
    "second directional derivative functional",
    "shared-mass decomposition",
    "plan gluing",
    "metric ratio sets",
    "diagonal mass under the strict triangle inequality",
    "c-monotonicity",
})

# statements exercised by each suite
ANCHORS = {
    "metric_axioms": ("Wasserstein distance with exponent min(1/p, 1)",),
    "dirac_distance": ("Wasserstein distance with exponent min(1/p, 1)",),
    "vallender": ("Vallender's formula",),
    "flip_isometry": ("flip isometry",),
    "snowflake": ("snowflake example",),
    "geodesic": ("geodesics via plan push-forward",),
    "dirac_ray": ("Dirac geodesic rays",),
    "antipodal": ("non-optimal antipodal plan",),
    "translation_identity": ("barycenter", "translation identity"),
    "orthogonality": ("orthogonality criterion",),
    "atom_recovery": ("potential function", "atom recovery limit"),
    "comb_identities": ("alternating binomial identities", "nonvanishing denominator"),
    "even_p_quotient": ("atom recovery limit",),
    "bisector": ("two-point measures and bisector mass",),
    "second_derivative": ("second directional derivative functional",),
    "marad_diagonal": ("shared-mass decomposition", "diagonal mass under the strict triangle inequality",
                       "c-monotonicity"),
    "ratio_sets": ("metric ratio sets", "plan gluing"),
    "rotation_isometry": ("barycentric rotation isometry",),
    "rotation_negative_control": ("barycentric rotation isometry",),
}


def anchor(name: str) -> str:
    return "; ".join(ANCHORS[name])


DEFAULT_BUDGETS = {
    "metric_axioms": 150,
    "dirac_distance": 200,
    "vallender": 200,
    "flip_isometry": 200,
    "snowflake": 200,
    "geodesic": 50,
    "dirac_ray": 50,
    "antipodal": 100,
    "translation_identity": 200,
    "orthogonality": 200,
    "atom_recovery": 10,
    "comb_identities": 200,
    "even_p_quotient": 50,
    "bisector": 100,
    "second_derivative": 50,
    "marad_diagonal": 200,
    "ratio_sets": 20,
    "rotation_isometry": 100,
    "rotation_negative_control": 10_000,
}

_SUITES: dict[str, Callable] = {}


def _suite(fn):
    _SUITES[fn.__name__.removeprefix("suite_")] = fn
    return fn


def suite_names() -> list[str]:
    return list(_SUITES)


def run_suite(name: str, seed: int = 0, budget: int | None = None,
              solver: Solver | None = None) -> SuiteReport:
    """Run one registered suite; ``solver`` replaces ``transport.solve`` for
    fault-injection tests of the metric checks."""
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(_SUITES)}")
    report = SuiteReport(name, anchor(name))
    start = time.perf_counter()
    _SUITES[name](report, seed, budget or DEFAULT_BUDGETS[name], solver or transport.solve)
    report.wall_time = time.perf_counter() - start
    return report


@dataclass
class AggregateReport:
    seed: int
    reports: list[SuiteReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    @property
    def wall_time(self) -> float:
        return sum(r.wall_time for r in self.reports)

    def pass_vector(self) -> tuple[bool, ...]:
        return tuple(r.ok for r in self.reports)

    def to_dict(self, with_time: bool = True) -> dict:
        out = {"seed": self.seed, "ok": self.ok,
               "suites": [r.to_dict(with_time) for r in self.reports]}
        if with_time:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, with_time: bool = True) -> str:
        return json.dumps(self.to_dict(with_time), sort_keys=True)


def run_all(seed: int = 0, budgets: dict | None = None, solver: Solver | None = None) -> AggregateReport:
    budgets = budgets or {}
    return AggregateReport(seed, [run_suite(n, seed, budgets.get(n), solver) for n in _SUITES])


def format_table(reports: list[SuiteReport]) -> str:
    lines = [f"{'suite':<26} {'status':<6} {'trials':>7} {'passes':>7} {'max dev':>10} {'time s':>7}"]
    for r in reports:
        lines.append(f"{r.suite:<26} {'PASS' if r.ok else 'FAIL':<6} {r.trials:>7} {r.passes:>7} "
                     f"{r.max_deviation:>10.3g} {r.wall_time:>7.2f}")
    return "\n".join(lines)


# --- suites -------------------------------------------------------------------

P_CHOICES = (0.5, 1.0, 2.0, 3.0)


@_suite
def suite_metric_axioms(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    spaces = (euclidean(2), powered_euclidean(1, 0.5), euclidean(1))
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        space = spaces[trial % len(spaces)]
        p = float(rng.choice(P_CHOICES))
        a, b, c = (random_measure(rng, space, max_atoms=4) for _ in range(3))
        dab, dba = solver(a, b, p).distance, solver(b, a, p).distance
        dbc, dac = solver(b, c, p).distance, solver(a, c, p).distance
        daa = solver(a, a, p).distance
        excess = max(dac - dab - dbc, 0.0)
        # the value itself must be the optimum over all couplings
        oracle = abs(solver(a, b, p).cost - transport.brute_force_solve(a, b, p).cost)
        ok = dab == dba and abs(daa) <= 1e-12 and excess <= 1e-9 and oracle <= 1e-10
        rep.record(ok, max(abs(dab - dba), excess, abs(daa), oracle), seed=seed, trial=trial,
                   p=p, mu=a, nu=b, eta=c)


@_suite
def suite_dirac_distance(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    spaces = (euclidean(1), euclidean(3), powered_euclidean(2, 0.5))
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        space = spaces[trial % len(spaces)]
        p = P_CHOICES[trial % len(P_CHOICES)]
        x, y = rng.uniform(-2, 2, size=(2, space.dim))
        got = solver(dirac(x, space), dirac(y, space), p).distance
        want = distance(space, x, y) ** min(p, 1.0)
        dev = abs(got - want)
        rep.record(dev <= 1e-10, dev, seed=seed, trial=trial, p=p)


def _unit_pair(rng):
    sp = euclidean(1)
    return (random_measure(rng, sp, low=0.0, high=1.0), random_measure(rng, sp, low=0.0, high=1.0))


@_suite
def suite_vallender(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        mu, nu = _unit_pair(stream(seed, rep.suite, trial))
        dev = abs(onedim.vallender_distance(mu, nu) - solver(mu, nu, 1.0).distance)
        rep.record(dev <= 1e-10, dev, seed=seed, trial=trial)


@_suite
def suite_flip_isometry(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        mu, nu = _unit_pair(rng)
        dev = abs(solver(onedim.flip(mu), onedim.flip(nu), 1.0).distance - solver(mu, nu, 1.0).distance)
        d = dyadic_measure(rng)
        involutive = onedim.flip(onedim.flip(d)) == d
        t = float(rng.uniform(0.0, 1.0))
        image = onedim.flip(dirac(t))
        witness = image == DiscreteMeasure([(0.0, t), (1.0, 1.0 - t)]) and len(image) == 2
        rep.record(dev <= 1e-8 and involutive and witness, dev, seed=seed, trial=trial, t=t)


@_suite
def suite_snowflake(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        mu, nu = _unit_pair(rng)
        for p in (1.5, 2.0, 3.0):
            r = onedim.snowflake_check(mu, nu, p)
            rep.record(r.ok, r.deviation, seed=seed, trial=trial, p=p)


def _geodesic_pairs(rng, T, n=20):
    return [tuple(sorted(rng.uniform(0.0, T, size=2))) for _ in range(n)]


@_suite
def suite_geodesic(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    space = euclidean(2)
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        p = (1.5, 2.0, 4.0)[trial % 3]
        mu, nu = random_measure(rng, space, 4), random_measure(rng, space, 4)
        if mu == nu:
            continue
        curve = geometry.geodesic(mu, nu, p)
        dev = geometry.geodesic_defect(curve, _geodesic_pairs(rng, curve.T))
        rep.record(dev <= 1e-8, dev, seed=seed, trial=trial, p=p)


@_suite
def suite_dirac_ray(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    space = euclidean(2)
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        p = (1.5, 2.0, 4.0)[trial % 3]
        nu = random_measure(rng, space, 4)
        x = rng.uniform(-1, 1, size=2)
        T = geometry.ray_length(x, nu, p)
        worst = 0.0
        for s, t in _geodesic_pairs(rng, 3 * T):
            d = solver(geometry.dirac_ray(x, nu, p, s), geometry.dirac_ray(x, nu, p, t), p).distance
            worst = max(worst, abs(d - (t - s)))
        rep.record(worst <= 1e-8, worst, seed=seed, trial=trial, p=p)


def non_collinear_instance(rng, max_atoms: int = 4):
    """Planar measure with at least two atoms whose support and the centre
    ``x`` are not on one line."""
    space = euclidean(2)
    while True:
        mu = random_measure(rng, space, max_atoms, min_atoms=2)
        x = rng.uniform(-1, 1, size=2)
        P = mu.coords() - x
        if np.linalg.matrix_rank(P, tol=1e-6) == 2:
            return mu, x


@_suite
def suite_antipodal(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        p = (1.5, 2.0, 3.0)[trial % 3]
        mu, x = non_collinear_instance(rng)
        r = geometry.check_antipodal_plan(mu, x, p)
        y = rng.uniform(-1, 1, size=2)
        control = geometry.check_antipodal_plan(dirac(y, euclidean(2)), x, p)
        ok = r.verdict == "strictly beaten" and control.verdict == "optimal"
        rep.record(ok, abs(control.gap), seed=seed, trial=trial, p=p)


@_suite
def suite_translation_identity(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    space = euclidean(2)
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        mu, nu = random_measure(rng, space, 4), random_measure(rng, space, 4)
        v = rng.uniform(-2, 2, size=2)
        r = geometry.check_translation_identity(mu, nu, v)
        moved = geometry.translate(mu, v)
        crit = geometry.is_translate(mu, moved)
        bary = np.abs(geometry.barycenter(moved) - geometry.barycenter(mu) - v).max()
        rep.record(r.ok and crit and bary <= 1e-12, max(r.deviation, bary), seed=seed, trial=trial)


def orthogonal_instance(rng, dim: int):
    """Measures supported in two orthogonal affine subspaces of R^dim."""
    Q = isometries.random_orthogonal(dim, rng)
    split = int(rng.integers(1, dim))
    L = geometry.AffineSubspace(tuple(rng.uniform(-1, 1, dim)), tuple(map(tuple, Q[:, :split].T)))
    M = geometry.AffineSubspace(tuple(rng.uniform(-1, 1, dim)), tuple(map(tuple, Q[:, split:].T)))

    def inside(S, n):
        B = np.asarray(S.directions).T
        return [np.asarray(S.point) + B @ rng.uniform(-1, 1, B.shape[1]) for _ in range(n)]

    space = euclidean(dim)
    mu = measure_on(rng, inside(L, int(rng.integers(1, 5))), space)
    nu = measure_on(rng, inside(M, int(rng.integers(1, 5))), space)
    return mu, nu, L, M


@_suite
def suite_orthogonality(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        mu, nu, L, M = orthogonal_instance(rng, 2 + trial % 2)
        r = geometry.check_orthogonality(mu, nu, L, M)
        dev = abs(r.w2_squared - r.rhs)
        rep.record(bool(r.supports_orthogonal) and r.identity_holds, dev, seed=seed, trial=trial)


RECOVERY_EXPONENTS = (1.0, 1.5, 3.0, 5.0)
RECOVERY_STEP = 1e-3
# atoms at least this far apart; the quotient error decays like (step/gap)^(2k-p)
RECOVERY_GAP = 1e4
RECOVERY_BOX = 1e5


def recovery_instance(rng):
    pts = separated_points(rng, 5, 2, -RECOVERY_BOX, RECOVERY_BOX, RECOVERY_GAP)
    mu = measure_on(rng, pts, euclidean(2))
    while True:
        off = rng.uniform(-RECOVERY_BOX, RECOVERY_BOX, size=2)
        if np.linalg.norm(pts - off, axis=1).min() >= RECOVERY_GAP / 4:
            return mu, off


def recovery_trial(mu, off, p, rng) -> tuple[float, float, float]:
    """(worst at-atom error, worst off-atom value, observed off-atom order)."""
    h = rng.normal(size=2)
    h /= np.linalg.norm(h)
    at_err = max(abs(analysis.peak_quotient(mu, p, pt, RECOVERY_STEP * h) - w) for pt, w in mu)
    off_val = abs(analysis.peak_quotient(mu, p, off, RECOVERY_STEP * h))
    probe = analysis.default_probe(mu, p, rng, at=off)
    order = analysis.atom_mass_estimate(mu, p, off, probe).order
    return at_err, off_val, order


@_suite
def suite_atom_recovery(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        mu, off = recovery_instance(rng)
        for p in RECOVERY_EXPONENTS:
            at_err, off_val, order = recovery_trial(mu, off, p, rng)
            expected = 2 * analysis.recovery_order(p) - p
            ok = at_err <= 1e-3 and off_val <= 1e-3 and order >= expected - 0.2
            rep.record(ok, max(at_err, off_val), seed=seed, trial=trial, p=p, order=order)


def scaled_denominator(p: float) -> float:
    """Half sum divided by the sum of absolute values of its terms."""
    k = analysis.recovery_order(p)
    terms = [math.comb(2 * k, j) * (-1) ** j * (k - j) ** p for j in range(k)]
    return math.fsum(terms) / math.fsum(abs(t) for t in terms)


def non_even_exponent(rng) -> float:
    while True:
        p = float(rng.uniform(0.0, 16.0))
        if p > 0 and not analysis.is_even_integer(p):
            return p


@_suite
def suite_comb_identities(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for k in range(2, 9):
        for m in range(1, k):
            r = analysis.comb_identity_check(k, m)
            rep.record(r.covered and r.value == 0, abs(r.value), k=k, m=m)
    rng = stream(seed, rep.suite)
    samples = [non_even_exponent(rng) for _ in range(budget)]
    # odd integers are the exponents closest to the identity's zeros
    samples += [float(p) for p in range(1, 16, 2)]
    for p in samples:
        v = scaled_denominator(p)
        rep.record(abs(v) > 1e-12, 0.0, p=p, scaled=v)


@_suite
def suite_even_p_quotient(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        p = float(2 * (1 + trial % 4))
        x = rng.uniform(-1, 1, size=2)
        h = rng.normal(size=2) * 10.0 ** rng.uniform(-4, -2)
        q = analysis.peak_quotient(dirac((0.0, 0.0), euclidean(2)), p, x, h, allow_even=True)
        rep.record(abs(q - 1) <= 1e-9, abs(q - 1), seed=seed, trial=trial, p=p)


def bisector_instance(rng):
    """Random (mu, x, a, b, p) with some atoms placed exactly on the bisector."""
    space = euclidean(2)
    x = rng.uniform(-1, 1, size=2)
    a, b = rng.choice(np.arange(-3, 4), size=2, replace=False).astype(float)
    mid = (a + b) / 2 * x
    perp = np.array([-x[1], x[0]])
    pts = []
    for _ in range(int(rng.integers(1, 6))):
        if rng.random() < 0.4:
            pts.append(mid + rng.uniform(-2, 2) * perp)
        else:
            pts.append(rng.uniform(-2, 2, size=2))
    p = float(rng.choice([0.5, 1.0, 1.5, 2.0, 3.0, 4.0]))
    return measure_on(rng, pts, space), x, a, b, p


@_suite
def suite_bisector(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        mu, x, a, b, p = bisector_instance(stream(seed, rep.suite, trial))
        r = analysis.hyperplane_mass_via_bisector(mu, x, a, b, p)
        dev = abs(r.length - r.direct_mass)
        rep.record(dev <= 1e-10, dev, seed=seed, trial=trial, p=p)


@_suite
def suite_second_derivative(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        p = (4, 6, 8)[trial % 3]
        # inside the unit disc the O(t^2) remainder stays below the tolerance up to p = 8
        mu = random_measure(rng, euclidean(2), 4, low=-0.7, high=0.7)
        x = rng.normal(size=2)
        x /= np.linalg.norm(x)
        exact = analysis.second_directional_functional(mu, p, x)
        fd = analysis.second_directional_difference(mu, p, x, 1e-4)
        dev = abs(exact - fd)
        rep.record(dev <= 1e-6, dev, seed=seed, trial=trial, p=p)


def overlapping_pair(rng, space, points):
    """Two measures on random overlapping subsets of ``points``."""
    n = len(points)
    while True:
        sa = rng.random(n) < 0.7
        sb = rng.random(n) < 0.7
        if sa.any() and sb.any() and (sa & sb).any():
            break
    mu = measure_on(rng, [points[i] for i in np.flatnonzero(sa)], space)
    nu = measure_on(rng, [points[i] for i in np.flatnonzero(sb)], space)
    return mu, nu


def marad_instance(rng, trial: int):
    space, points = strict_triangle_support(rng, trial, int(rng.integers(2, 6)))
    return overlapping_pair(rng, space, points)


@_suite
def suite_marad_diagonal(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for trial in range(budget):
        mu, nu = marad_instance(stream(seed, rep.suite, trial), trial)
        plans = [solver(mu, nu, 1.0).plan]
        if len(mu) * len(nu) <= transport.BRUTE_FORCE_MAX_CELLS:
            plans += list(transport.brute_force_solve(mu, nu, 1.0).optimal_plans)
        checks = [transport.diagonal_mass_check(mu, nu, pl) for pl in plans]
        worst = max(c.max_deviation for c in checks)
        monotone = transport.check_c_monotone(plans[0], 1.0, tol=1e-10).monotone
        rep.record(all(c.ok for c in checks) and monotone, worst, seed=seed, trial=trial,
                   mu=mu, nu=nu, optimal_vertices=len(plans) - 1)


def strict_triangle_support(rng, trial: int, n: int):
    """A strict-triangle ground space and ``n`` distinct points of it."""
    if trial % 2:
        return random_ultrametric(rng, n), [(float(i),) for i in range(n)]
    return powered_euclidean(1, 0.5), [(float(v),) for v in rng.uniform(0, 1, n)]


def singleton_residual_pair(rng, space, points):
    """``mu = s + t delta_x``, ``nu = s + t delta_y`` with shared part ``s``."""
    n = len(points)
    t = float(rng.uniform(0.1, 0.9))
    shared = rng.dirichlet(np.ones(n - 2)) * (1 - t)
    common = list(zip(points[2:], shared))
    return (normalize(common + [(points[0], t)], space), normalize(common + [(points[1], t)], space))


@_suite
def suite_ratio_sets(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    search_budget = 500
    for trial in range(budget):
        rng = stream(seed, rep.suite, trial)
        space, points = strict_triangle_support(rng, trial, int(rng.integers(3, 6)))
        mu, nu = singleton_residual_pair(rng, space, points)
        lam = float(rng.uniform(0.05, 0.95))
        eta = geometry.ratio_point(mu, nu, lam)
        r = geometry.check_ratio_membership(mu, nu, lam, eta)
        second = geometry.search_second_ratio_member(mu, nu, lam, rng, search_budget)
        # gluing the two optimal legs through eta costs no more than the sum
        pi1, pi2 = solver(mu, eta, 1.0).plan, solver(eta, nu, 1.0).plan
        glued = transport.plan_cost(transport.glue(pi1, pi2), 1.0)
        gap = glued - (r.d_mu_eta + r.d_eta_nu)
        ok = r.member and second is None and gap <= 1e-9
        rep.record(ok, r.deviation, seed=seed, trial=trial, lam=lam, mu=mu, nu=nu)
    rep.notes.append(f"second-member search: {search_budget} candidates per pair; "
                     "no counterexample is a bounded check, not a proof")


@_suite
def suite_rotation_isometry(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    for dim in (2, 3):
        R = isometries.random_orthogonal(dim, stream(seed, rep.suite, dim))
        r = isometries.verify_isometry(isometries.KloecknerRotation(R), 2.0, budget, seed=seed)
        for v in r.violations:
            rep.record(False, v["deviation"], dim=dim, **v)
        for _ in range(r.trials - len(r.violations)):
            rep.record(True, 0.0)
        rep.max_deviation = max(rep.max_deviation, r.max_deviation)


@_suite
def suite_rotation_negative_control(rep: SuiteReport, seed: int, budget: int, solver: Solver) -> None:
    R = isometries.rotation_matrix(math.pi / 2)
    r = isometries.verify_isometry(isometries.KloecknerRotation(R), 3.0, budget, seed=seed,
                                   stop_on_violation=True)
    found = bool(r.violations)
    rep.record(found, r.max_deviation, seed=seed, trials_used=r.trials)
    rep.notes.append(f"violation found after {r.trials} trials" if found
                     else f"no violation in {r.trials} trials (anomaly)")
