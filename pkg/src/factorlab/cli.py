"""Command-line interface.

Every run prints one deterministic JSON document (or CSV rows with --csv) to
stdout and a full run manifest, including wall time, to stderr.  Execution
details that do not influence the numbers (--threads, timing) stay out of
stdout so identical configurations reproduce byte-identical output.

Exit codes: 0 success, 1 domain error, 2 usage or input-file error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import jsonio
from .constants import DegreeList, all_constants
from .errors import FactorlabError
from .extremal import certify_equality, coordinate_tuple, exact_norm_estimate
from .norms import EstimatorConfig, estimate_sup_norm
from .poly import poly_from_json
from .schatten import ProjectionPair, pinching_checks
from .search import SearchConfig, derived_seed, minimize_ratio, verify_batch

VERSION = "0.1.0"
DEFAULT_SEED = 42


def _parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse exponent {text!r}")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("FACTORLAB_SEED", DEFAULT_SEED))


def _estimator_config(args, seed: int) -> EstimatorConfig:
    return EstimatorConfig(
        num_starts=args.starts,
        max_iters=args.max_iters,
        grad_tol=args.grad_tol,
        seed=seed,
    )


def _add_common(sub, starts_default: int = 64):
    sub.add_argument("--seed", type=int, default=None,
                     help="base RNG seed (default: FACTORLAB_SEED env var or 42)")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker cap; results are independent of this")
    sub.add_argument("--starts", type=int, default=starts_default,
                     help="estimator starts per norm")
    sub.add_argument("--max-iters", type=int, default=500)
    sub.add_argument("--grad-tol", type=float, default=1e-10)


def cmd_constants(args):
    rec = all_constants(DegreeList.parse(args.ks), args.p)
    config = {"ks": list(rec.ks), "p": args.p}
    return rec.to_json(), config


def cmd_norm(args):
    with open(args.poly, encoding="utf-8") as fh:
        P = poly_from_json(json.load(fh))
    seed = _resolve_seed(args)
    cfg = _estimator_config(args, seed)
    method = "estimated"
    est = None
    if not args.force_numeric:
        try:
            est = exact_norm_estimate(P, args.p)
            method = "exact"
        except FactorlabError:
            est = None
    if est is None:
        est = estimate_sup_norm(P, args.p, cfg)
    config = {
        "poly": args.poly, "p": args.p, "seed": seed,
        "starts": args.starts, "max_iters": args.max_iters,
        "grad_tol": args.grad_tol, "force_numeric": bool(args.force_numeric),
    }
    result = {"method": method, "estimate": est.to_json()}
    return result, config


def _search_config(args, seed: int) -> SearchConfig:
    return SearchConfig(
        num_vars=args.n_vars,
        degrees=DegreeList.parse(args.ks).ks,
        p=args.p,
        num_tuples=getattr(args, "tuples", 1),
        seed=seed,
        norm_cfg=_estimator_config(args, seed),
        restarts=getattr(args, "restarts", 1),
        max_evals=getattr(args, "max_evals", 1500),
        coef_distribution=args.dist,
    )


def _result_csv(result) -> str:
    lines = ["seed,ratio,slack,converged"]
    for seed, rep in zip(result.seeds, result.reports):
        lines.append("%d,%.17g,%.17g,%s"
                     % (seed, rep.ratio, rep.slack, str(rep.converged).lower()))
    return "\n".join(lines)


def cmd_verify(args):
    seed = _resolve_seed(args)
    cfg = _search_config(args, seed)
    result = verify_batch(cfg, threads=args.threads)
    config = {
        "ks": list(cfg.degrees), "p": cfg.p, "n_vars": cfg.num_vars,
        "tuples": cfg.num_tuples, "seed": seed, "dist": cfg.coef_distribution,
        "starts": args.starts, "max_iters": args.max_iters, "grad_tol": args.grad_tol,
    }
    if args.csv:
        return _result_csv(result), config
    return result.to_json(), config


def cmd_search(args):
    seed = _resolve_seed(args)
    cfg = _search_config(args, seed)
    result = minimize_ratio(cfg, threads=args.threads)
    config = {
        "ks": list(cfg.degrees), "p": cfg.p, "n_vars": cfg.num_vars,
        "restarts": cfg.restarts, "max_evals": cfg.max_evals, "seed": seed,
        "dist": cfg.coef_distribution,
        "starts": args.starts, "max_iters": args.max_iters, "grad_tol": args.grad_tol,
    }
    if args.csv:
        return _result_csv(result), config
    return result.to_json(), config


def cmd_extremal(args):
    seed = _resolve_seed(args)
    ks = DegreeList.parse(args.ks)
    t = coordinate_tuple(ks, args.n_vars)
    cfg = _estimator_config(args, seed)
    report = certify_equality(t, args.p, mode=args.mode, cfg=cfg)
    config = {
        "ks": list(ks.ks), "p": args.p, "n_vars": args.n_vars,
        "mode": args.mode, "seed": seed,
    }
    return report.to_json(), config


def cmd_pinch(args):
    seed = _resolve_seed(args)
    cut = args.cut if args.cut is not None else args.dim // 2
    pp = ProjectionPair.split(args.dim, cut)
    additivity = contraction = 0
    for i in range(args.samples):
        rng = np.random.default_rng(derived_seed(seed, i))
        A = rng.standard_normal((args.dim, args.dim)) \
            + 1j * rng.standard_normal((args.dim, args.dim))
        ok_add, ok_con = pinching_checks(A, pp, args.p)
        additivity += ok_add
        contraction += ok_con
    config = {
        "dim": args.dim, "p": args.p, "samples": args.samples,
        "seed": seed, "cut": cut,
    }
    result = {
        "samples": args.samples,
        "additivity_passes": additivity,
        "contraction_passes": contraction,
        "all_passed": additivity == args.samples and contraction == args.samples,
    }
    return result, config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factorlab",
        description="Sharp lower bounds for sup-norms of products of homogeneous "
                    "polynomials on complex lp spheres and Schatten classes.",
    )
    parser.add_argument("--version", action="version", version=VERSION)
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("constants", help="analytic constants for a degree list")
    sp.add_argument("--ks", required=True, help="comma-separated degrees, e.g. 2,1")
    sp.add_argument("--p", type=_parse_p, required=True)
    sp.set_defaults(handler=cmd_constants, seed=None)

    sp = subs.add_parser("norm", help="sup-norm of a polynomial from a JSON file")
    sp.add_argument("poly", help="path to polynomial JSON")
    sp.add_argument("--p", type=_parse_p, required=True)
    sp.add_argument("--force-numeric", action="store_true",
                    help="skip closed forms even when the shape is recognized")
    _add_common(sp)
    sp.set_defaults(handler=cmd_norm)

    sp = subs.add_parser("verify", help="test the inequality on random tuples")
    sp.add_argument("--ks", required=True)
    sp.add_argument("--p", type=_parse_p, required=True)
    sp.add_argument("--n-vars", type=int, required=True)
    sp.add_argument("--tuples", type=int, default=200)
    sp.add_argument("--dist", choices=("gaussian", "sparse"), default="gaussian")
    sp.add_argument("--csv", action="store_true", help="per-tuple CSV rows")
    _add_common(sp, starts_default=16)
    sp.set_defaults(handler=cmd_verify)

    sp = subs.add_parser("search", help="minimize the ratio over tuples")
    sp.add_argument("--ks", required=True)
    sp.add_argument("--p", type=_parse_p, required=True)
    sp.add_argument("--n-vars", type=int, required=True)
    sp.add_argument("--restarts", type=int, default=16)
    sp.add_argument("--max-evals", type=int, default=1500)
    sp.add_argument("--dist", choices=("gaussian", "sparse"), default="gaussian")
    sp.add_argument("--csv", action="store_true", help="per-restart CSV rows")
    _add_common(sp, starts_default=8)
    sp.set_defaults(handler=cmd_search)

    sp = subs.add_parser("extremal", help="certify an extremal coordinate tuple")
    sp.add_argument("--ks", required=True)
    sp.add_argument("--p", type=_parse_p, required=True)
    sp.add_argument("--n-vars", type=int, required=True)
    sp.add_argument("--mode", choices=("exact", "estimated"), default="exact")
    _add_common(sp)
    sp.set_defaults(handler=cmd_extremal)

    sp = subs.add_parser("pinch", help="pinching checks on random matrices")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--p", type=_parse_p, required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--cut", type=int, default=None,
                    help="size of the first block (default dim//2)")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(handler=cmd_pinch)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        result, config = args.handler(args)
    except FactorlabError as exc:
        sys.stderr.write(jsonio.dumps(
            {"error": type(exc).__name__, "message": str(exc)}
        ) + "\n")
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(jsonio.dumps(
            {"error": type(exc).__name__, "message": str(exc)}
        ) + "\n")
        return 2
    wall = time.monotonic() - started

    manifest = {
        "command": args.command,
        "seed": _seed_or_default(args),
        "config": config,
        "version": VERSION,
    }
    if isinstance(result, str):  # CSV mode
        sys.stdout.write(result + "\n")
    else:
        sys.stdout.write(jsonio.dumps({"manifest": manifest, "result": result}) + "\n")
    full = dict(manifest)
    full["argv"] = argv
    full["wall_time_s"] = wall
    sys.stderr.write(jsonio.dumps({"run_manifest": full}) + "\n")
    return 0


def _seed_or_default(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("FACTORLAB_SEED", DEFAULT_SEED))


if __name__ == "__main__":
    sys.exit(main())
