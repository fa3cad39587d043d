"""Command-line front end: ``wlab <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analysis, geometry, harness, isometries, onedim, transport
from .measures import DiscreteMeasure, MeasureError, lattice_decompose
from .sampling import stream

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Malformed command-line input."""


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _round(obj):
    """Round every float to 12 significant digits; integral values become ints."""
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        r = float(fmt(obj))
        return int(r) if r.is_integer() and abs(r) < 1e15 else r
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True)


def load_measure(path: str) -> DiscreteMeasure:
    try:
        with open(path, encoding="utf-8") as fh:
            return DiscreteMeasure.from_json(json.load(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg})") from exc
    except MeasureError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def parse_vector(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"non-finite entry in {text!r}")
    return vals


def _square(entries: list[float], kind: str) -> np.ndarray:
    d = math.isqrt(len(entries))
    if d * d != len(entries):
        raise UsageError(f"{kind}: {len(entries)} entries do not form a square matrix")
    return np.array(entries).reshape(d, d)


def parse_isometry(spec: str) -> isometries.IsometryMap:
    """``translate:v1,...`` | ``orthogonal:row-major`` | ``rotation:row-major`` | ``flip``."""
    kind, _, body = spec.partition(":")
    try:
        if kind == "flip" and not body:
            return isometries.Flip()
        if kind == "translate":
            return isometries.Pushforward.translation(parse_vector(body))
        if kind == "orthogonal":
            Q = _square(parse_vector(body), kind)
            return isometries.Pushforward(Q, np.zeros(len(Q)))
        if kind == "rotation":
            return isometries.KloecknerRotation(_square(parse_vector(body), kind))
    except ValueError as exc:
        raise UsageError(f"bad isometry {spec!r}: {exc}") from exc
    raise UsageError(f"unknown isometry {spec!r}; use translate:, orthogonal:, rotation: or flip")


def _seed(args) -> int:
    env = os.environ.get("WLAB_SEED")
    if env is None:
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"WLAB_SEED must be an integer, got {env!r}") from None


# --- subcommands ---------------------------------------------------------------

def cmd_dist(args, out) -> int:
    res = transport.solve(load_measure(args.mu), load_measure(args.nu), args.p)
    print(fmt(res.distance), file=out)
    if args.plan:
        print(dumps(res.plan.to_json()), file=out)
    return EXIT_OK


def cmd_geodesic(args, out) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    curve = geometry.geodesic(load_measure(args.mu), load_measure(args.nu), args.p)
    for i in range(args.samples):
        t = curve.T if i == args.samples - 1 else curve.T * i / (args.samples - 1)
        print(dumps({"t": t, "measure": curve(t).to_json()}), file=out)
    return EXIT_OK


def cmd_flip(args, out) -> int:
    mu = load_measure(args.mu)
    if args.cdf:
        F = onedim.cdf(onedim.flip(mu))
        print(dumps({"breakpoints": F.breakpoints, "levels": F.values}), file=out)
    else:
        print(dumps(onedim.flip(mu).to_json()), file=out)
    return EXIT_OK


def cmd_apply(args, out) -> int:
    iso = parse_isometry(args.iso)
    print(dumps(iso.apply(load_measure(args.mu)).to_json()), file=out)
    return EXIT_OK


def cmd_atoms(args, out) -> int:
    mu = load_measure(args.mu)
    x = parse_vector(args.at)
    if len(x) != mu.dim:
        raise UsageError(f"--at has {len(x)} coordinates, measure lives in dimension {mu.dim}")
    probe = analysis.default_probe(mu, args.p, stream(_seed(args), "atoms"), args.steps, at=x)
    est = analysis.atom_mass_estimate(mu, args.p, x, probe)
    print("step,estimate,order", file=out)
    prev = None
    for s, e in zip(est.steps, est.estimates):
        order = ""
        if prev is not None and e != 0 and prev[1] != 0:
            order = fmt(math.log(abs(e / prev[1])) / math.log(s / prev[0]))
        print(f"{fmt(s)},{fmt(e)},{order}", file=out)
        prev = (s, e)
    return EXIT_OK


def cmd_bisector(args, out) -> int:
    mu = load_measure(args.mu)
    x = parse_vector(args.x)
    if len(x) != mu.dim:
        raise UsageError(f"--x has {len(x)} coordinates, measure lives in dimension {mu.dim}")
    print(fmt(analysis.hyperplane_mass_via_bisector(mu, x, args.a, args.b, args.p).length), file=out)
    return EXIT_OK


def cmd_decompose(args, out) -> int:
    print(dumps(lattice_decompose(load_measure(args.mu), load_measure(args.nu)).to_json()), file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    seed = _seed(args)
    if args.suite != "all" and args.suite not in harness.suite_names():
        raise UsageError(f"unknown suite {args.suite!r}")
    names = harness.suite_names() if args.suite == "all" else [args.suite]
    reports = [harness.run_suite(n, seed, args.budget) for n in names]
    agg = harness.AggregateReport(seed, reports)
    print(harness.format_table(reports), file=out)
    print(f"{'PASS' if agg.ok else 'FAIL'}: {sum(r.ok for r in reports)}/{len(reports)} suites, "
          f"seed {seed}", file=out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(agg.to_json() + "\n")
    return EXIT_OK if agg.ok else EXIT_FAIL


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wlab", description="Exact Wasserstein computations on discrete measures.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("dist", help="Wasserstein distance between two measures")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--p", type=_positive, required=True)
    p.add_argument("--plan", action="store_true", help="also print an optimal plan as JSON")
    p.set_defaults(run=cmd_dist)

    p = sub.add_parser("geodesic", help="sample the displacement geodesic (p > 1)")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--p", type=_positive, required=True)
    p.add_argument("--samples", type=int, default=11)
    p.set_defaults(run=cmd_geodesic)

    p = sub.add_parser("flip", help="exchange distribution and quantile function on [0, 1]")
    p.add_argument("mu")
    p.add_argument("--cdf", action="store_true", help="print breakpoints and levels of the image CDF")
    p.set_defaults(run=cmd_flip)

    p = sub.add_parser("apply", help="apply an isometry")
    p.add_argument("--iso", required=True, metavar="SPEC")
    p.add_argument("mu")
    p.set_defaults(run=cmd_apply)

    p = sub.add_parser("atoms", help="atom-mass estimates from potential differences")
    p.add_argument("mu")
    p.add_argument("--p", type=_positive, required=True)
    p.add_argument("--at", required=True, metavar="X1,...,XD")
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_atoms)

    p = sub.add_parser("bisector", help="mass of a bisector hyperplane via two-point measures")
    p.add_argument("mu")
    p.add_argument("--x", required=True, metavar="X1,...,XD")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=_positive, required=True)
    p.set_defaults(run=cmd_bisector)

    p = sub.add_parser("decompose", help="shared mass and signed residuals")
    p.add_argument("mu")
    p.add_argument("nu")
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("suite", nargs="?", default="all", help="suite name or 'all'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(run=cmd_verify)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.run(args, out)
    except (UsageError, MeasureError, transport.TransportError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"wlab {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
