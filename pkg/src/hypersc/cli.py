"""Command-line interface: ``hypersc <command> [options]``.

Exit codes: 0 success, 1 mathematical failure (a bound is violated, a solver
does not converge), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import math
import sys
from importlib import resources

import numpy as np

from . import __version__
from .analyzer import BallBarrierFamily, SqdistFamily, barrier_sigma, certify, tightness_scan
from .errors import HyperSCError, UsageError
from .fields import LogBarrierField, SquaredDistanceField
from .io import dumps, read_points, result_document, write_trace
from .manifolds import Hyperboloid, from_coords
from .meb import MebInstance, barrier_family, oracle_solve, solve as meb_solve
from .newton import minimize
from .oracles import derivative_check
from .pathfollow import PathParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def bundled_points_path():
    """Path of the bundled five-point instance."""
    return str(resources.files("hypersc") / "data" / "five_points.json")


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
        if not (v > 0 and math.isfinite(v)):
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return v
    return parse


def _emit(doc, out=None):
    text = dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------


def cmd_check_derivatives(args):
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    worst = derivative_check(args.dim, args.kappa, args.samples, args.seed)
    ok = all(w["error"] <= args.tol for w in worst.values())
    doc = {
        "command": "check-derivatives",
        "config": {"dim": args.dim, "kappa": args.kappa, "samples": args.samples, "seed": args.seed, "tol": args.tol},
        "passed": ok,
        "max_error": max(w["error"] for w in worst.values()),
        "worst": worst,
    }
    _emit(doc)
    return EXIT_OK if ok else EXIT_FAIL


def _tightness_rows(radii, dim, kappa):
    return [{"R": p.R, "l": p.l, "wsc_ratio": p.ratio, "lower_bound": p.lower_bound, "upper_bound": p.upper_bound}
            for p in tightness_scan(radii, dim=dim, kappa=kappa)]


def cmd_certify_sc(args):
    common = {"samples": args.samples, "seed": args.seed}
    if args.field == "sqdist":
        fam = SqdistFamily(args.dim, args.kappa, lmax=args.lmax)
        rep = certify(fam, **common)
        doc = rep.to_dict()
        ok = rep.within_bounds()
    elif args.field == "ball-barrier":
        radii = args.radius or [5.0]
        reports = [certify(BallBarrierFamily(R, args.dim, args.kappa), **common) for R in radii]
        ok = all(r.within_bounds() for r in reports)
        doc = {
            "field": "ball-barrier",
            "within_bounds": ok,
            "tightness_scan": _tightness_rows(radii, args.dim, args.kappa),
            "reports": [r.to_dict() for r in reports],
        }
    else:
        pts, kappa, _ = read_points(args.points or bundled_points_path())
        rep = certify(barrier_family(MebInstance(pts, kappa)), **common)
        doc = rep.to_dict()
        ok = rep.within_bounds()
    _emit(doc)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_newton_demo(args):
    """Newton's method on the ball barrier ``-log(R^2/2 - d(p, x)^2/2)`` from random starts."""
    H = Hyperboloid(args.dim, args.kappa)
    o = H.origin()
    R = args.radius
    F = LogBarrierField(SquaredDistanceField(H, o), R * R / 2.0)
    sigma = barrier_sigma(math.sqrt(args.kappa) / 2.0, R * R / 2.0)
    rng = np.random.default_rng(args.seed)
    runs = []
    for _ in range(args.starts):
        d = rng.normal(size=args.dim)
        d *= R * rng.uniform(0.0, 0.999) / np.linalg.norm(d)
        x0 = H.exp(o, from_coords(H, o, d))
        x, st, trace = minimize(F, x0, sigma, args.tol, lower_bound=-math.log(R * R / 2.0))
        runs.append({
            "start": x0.tolist(),
            "minimizer": x.tolist(),
            "decrement": st.decrement,
            "damped_steps": trace.count("damped"),
            "full_steps": trace.count("full"),
            "records": [{"iter": r.iter, "kind": r.kind, "lambda": r.decrement, "value": r.value, "bound": r.bound}
                        for r in trace.records],
        })
    doc = {
        "command": "newton-demo",
        "config": {"dim": args.dim, "kappa": args.kappa, "radius": R, "starts": args.starts, "seed": args.seed,
                   "tol": args.tol, "sigma": sigma},
        "runs": runs,
    }
    _emit(doc)
    return EXIT_OK


def _load_instance(path, epsilon=1e-5):
    pts, kappa, dim = read_points(path)
    return MebInstance(pts, kappa, epsilon), dim


def cmd_meb(args):
    inst, dim = _load_instance(args.points, args.epsilon)
    params = PathParams(args.beta)
    sol = meb_solve(inst, params)
    config = {"command": "meb", "points": len(inst.points), "dim": dim, "kappa": inst.kappa,
              "epsilon": args.epsilon, "beta": params.beta}
    doc = result_document(sol, config)
    doc["target_gap"] = sol.target_gap
    if sol.trace is not None:
        doc["path_iteration_bound"] = sol.trace.iteration_bound
    _emit(doc, args.out)
    if args.trace:
        write_trace(args.trace, sol.trace.records if sol.trace is not None else [])
    return EXIT_OK if sol.gap_certificate <= sol.target_gap else EXIT_FAIL


def cmd_oracle_meb(args):
    if args.iters < 1:
        raise UsageError("--iters must be positive")
    inst, dim = _load_instance(args.points)
    sol = oracle_solve(inst, args.iters)
    config = {"command": "oracle-meb", "points": len(inst.points), "dim": dim, "kappa": inst.kappa,
              "iters": args.iters}
    _emit(result_document(sol, config), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="hypersc", description="Self-concordance toolkit for hyperbolic space.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-derivatives", help="closed-form derivatives of d^2/2 against finite differences")
    c.add_argument("--dim", type=int, default=2)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=_positive(float), default=1e-6)
    c.add_argument("--kappa", type=_positive(float), default=1.0)
    c.set_defaults(func=cmd_check_derivatives)

    c = sub.add_parser("certify-sc", help="search for the self-concordance constants of a field family")
    c.add_argument("--field", choices=("sqdist", "ball-barrier", "meb-barrier"), required=True)
    c.add_argument("--kappa", type=_positive(float), default=1.0)
    c.add_argument("--samples", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--lmax", type=_positive(float), default=50.0, help="largest sampled distance (sqdist)")
    c.add_argument("--radius", type=_positive(float), nargs="+", help="ball radii (ball-barrier); several give a sweep")
    c.add_argument("--dim", type=int, default=2)
    c.add_argument("--points", help="points file (meb-barrier; default: bundled instance)")
    c.set_defaults(func=cmd_certify_sc)

    c = sub.add_parser("newton-demo", help="Newton's method on a ball barrier")
    c.add_argument("--radius", type=_positive(float), default=5.0)
    c.add_argument("--dim", type=int, default=2)
    c.add_argument("--kappa", type=_positive(float), default=1.0)
    c.add_argument("--starts", type=int, default=5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=_positive(float), default=1e-10, help="target Newton decrement")
    c.set_defaults(func=cmd_newton_demo)

    c = sub.add_parser("meb", help="minimum enclosing ball by path-following")
    c.add_argument("--points", required=True)
    c.add_argument("--epsilon", type=_positive(float), default=1e-5)
    c.add_argument("--beta", type=_positive(float), default=1.0 / 9.0)
    c.add_argument("--trace", help="CSV trace output")
    c.add_argument("--out", help="result JSON output (default: stdout)")
    c.set_defaults(func=cmd_meb)

    c = sub.add_parser("oracle-meb", help="minimum enclosing ball by farthest-point iteration")
    c.add_argument("--points", required=True)
    c.add_argument("--iters", type=int, default=1_000_000)
    c.add_argument("--out", help="result JSON output (default: stdout)")
    c.set_defaults(func=cmd_oracle_meb)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        for name, least in (("samples", 1), ("starts", 1), ("dim", 2)):
            value = getattr(args, name, None)
            if value is not None and value < least:
                raise UsageError(f"--{name} must be at least {least}")
        return args.func(args)
    except UsageError as exc:
        print(f"hypersc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hypersc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HyperSCError as exc:
        print(f"hypersc: failure: {exc}", file=sys.stderr)
        witness = getattr(exc, "witness", None)
        if witness is not None:
            print(f"hypersc: witness: {witness!r}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
