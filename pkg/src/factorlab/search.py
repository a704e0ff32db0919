"""Random-tuple verification and ratio minimization.

verify_batch throws random tuples at the factor inequality and flags any ratio
that lands more than a relative tolerance below the proven bound (for
1 < p <= 2 a flag means the norm estimator failed, not that a counterexample
exists).  minimize_ratio pattern-searches tuple coefficients to push the ratio
down, producing empirical upper bounds on the optimal constant; for p > 2
that constant is only known to sit inside the sandwich.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import DegreeList, guaranteed_lower_bound
from .errors import InvalidArgs
from .extremal import PolyTuple, RatioReport
from .norms import EstimatorConfig, estimate_sup_norm
from .poly import HomogeneousPoly, all_multi_indices, make_poly, product

# Relative slack below the proven bound before a ratio counts as a violation;
# sits well above the observed estimator error on closed-form instances.
VIOLATION_REL_TOL = 1e-3

SPARSE_KEEP_FRACTION = 0.25

_SEARCH_NORM_CFG = EstimatorConfig(num_starts=16, max_iters=300, grad_tol=1e-9)


@dataclass(frozen=True)
class SearchConfig:
    num_vars: int
    degrees: tuple[int, ...]
    p: float
    num_tuples: int = 200
    seed: int = 42
    norm_cfg: EstimatorConfig = _SEARCH_NORM_CFG
    restarts: int = 16
    max_evals: int = 1500
    coef_distribution: str = "gaussian"

    def __post_init__(self):
        DegreeList(tuple(self.degrees))  # validates
        if self.num_vars < 1 or self.num_tuples < 1 or self.restarts < 1:
            raise InvalidArgs(f"bad search config: {self}")
        if self.coef_distribution not in ("gaussian", "sparse"):
            raise InvalidArgs(f"unknown distribution {self.coef_distribution!r}")


@dataclass(frozen=True)
class SearchResult:
    best_tuple: PolyTuple
    best_ratio: float
    trace: tuple[tuple[int, float], ...]
    reports: tuple[RatioReport, ...]
    seeds: tuple[int, ...]
    flags: tuple[bool, ...]

    @property
    def num_flagged(self) -> int:
        return sum(self.flags)

    def to_json(self) -> dict:
        from .poly import poly_to_json

        return {
            "best_ratio": self.best_ratio,
            "best_tuple": [poly_to_json(P) for P in self.best_tuple.polys],
            "num_flagged": self.num_flagged,
            "trace": [[int(c), r] for c, r in self.trace],
            "reports": [r.to_json() for r in self.reports],
            "seeds": [int(s) for s in self.seeds],
            "flags": list(self.flags),
        }


def derived_seed(*key: int) -> int:
    """A single deterministic integer seed from a tuple of integers."""
    return int(np.random.SeedSequence(list(key)).generate_state(1, np.uint64)[0])


def random_poly(
    num_vars: int, degree: int, seed: int, distribution: str = "gaussian"
) -> HomogeneousPoly:
    """Random homogeneous polynomial: dense complex Gaussian coefficients, or
    a ~25%-support sparse variant (never empty)."""
    exps = all_multi_indices(num_vars, degree)
    rng = np.random.default_rng(seed)
    coefs = (rng.standard_normal(len(exps)) + 1j * rng.standard_normal(len(exps)))
    coefs /= np.sqrt(2.0)
    if distribution == "sparse":
        keep = rng.random(len(exps)) < SPARSE_KEEP_FRACTION
        if not keep.any():
            keep[rng.integers(len(exps))] = True
        coefs = np.where(keep, coefs, 0.0)
    elif distribution != "gaussian":
        raise InvalidArgs(f"unknown distribution {distribution!r}")
    return make_poly(num_vars, degree, dict(zip(exps, coefs)))


def ratio(
    t: PolyTuple,
    p: float,
    cfg: EstimatorConfig | None = None,
    _factor_cache: dict | None = None,
) -> RatioReport:
    """Estimated product norm over estimated factor norms, against the proven bound.

    The optional cache maps factor term-tuples to (value, converged) pairs so
    the pattern search, which perturbs one factor at a time, does not
    re-estimate the untouched factors.
    """
    cfg = cfg or EstimatorConfig()
    factor_norms, factors_converged = [], True
    for P in t.polys:
        hit = _factor_cache.get(P.terms) if _factor_cache is not None else None
        if hit is None:
            est = estimate_sup_norm(P, p, cfg)
            hit = (est.value, est.converged)
            if _factor_cache is not None:
                _factor_cache[P.terms] = hit
        factor_norms.append(hit[0])
        factors_converged &= hit[1]
    pe = estimate_sup_norm(product(t.polys), p, cfg)
    denom = math.prod(factor_norms)
    r = pe.value / denom
    target = guaranteed_lower_bound(t.degrees, p)
    return RatioReport(
        product_norm=pe.value,
        factor_norms=tuple(factor_norms),
        ratio=r,
        target=target,
        slack=r - target,
        method="estimated",
        converged=pe.converged and factors_converged,
    )


def _parallel_map(fn: Callable, count: int, threads: int | None) -> list:
    """Run fn(0..count-1), preserving index order regardless of worker count."""
    if threads is None:
        threads = 1
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def _random_tuple(cfg: SearchConfig, task_index: int) -> PolyTuple:
    return PolyTuple(tuple(
        random_poly(
            cfg.num_vars,
            k,
            derived_seed(cfg.seed, task_index, j),
            cfg.coef_distribution,
        )
        for j, k in enumerate(cfg.degrees)
    ))


def verify_batch(cfg: SearchConfig, threads: int | None = None) -> SearchResult:
    """Test the factor inequality on ``num_tuples`` random tuples.

    A report is flagged when its ratio falls more than VIOLATION_REL_TOL
    (relative) below the proven lower bound.
    """

    def task(i: int) -> tuple[PolyTuple, RatioReport]:
        t = _random_tuple(cfg, i)
        return t, ratio(t, cfg.p, cfg.norm_cfg)

    results = _parallel_map(task, cfg.num_tuples, threads)
    reports = tuple(rep for _, rep in results)
    flags = tuple(
        rep.ratio < rep.target * (1.0 - VIOLATION_REL_TOL) for rep in reports
    )
    trace: list[tuple[int, float]] = []
    best_i = 0
    for i, rep in enumerate(reports):
        if not trace or rep.ratio < trace[-1][1]:
            trace.append((i + 1, rep.ratio))
            best_i = i
    return SearchResult(
        best_tuple=results[best_i][0],
        best_ratio=reports[best_i].ratio,
        trace=tuple(trace),
        reports=reports,
        seeds=tuple(derived_seed(cfg.seed, i) for i in range(cfg.num_tuples)),
        flags=flags,
    )


# Pattern search knobs: initial step relative to the (unit) coefficient scale,
# halving on a failed sweep, stop when the step dips below 1e-6.
_PS_INIT_STEP = 0.1
_PS_MIN_STEP = 1e-6


class _CoefficientSpace:
    """Dense real parametrization of a tuple of factors, one (re, im) pair per
    monomial of each factor's full support."""

    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        self.supports = [
            all_multi_indices(cfg.num_vars, k) for k in cfg.degrees
        ]
        self.sizes = [len(s) for s in self.supports]

    def pack(self, t: PolyTuple) -> np.ndarray:
        xs = []
        for P, support in zip(t.polys, self.supports):
            lookup = dict(P.terms)
            c = np.array([lookup.get(e, 0j) for e in support])
            xs.append(np.concatenate([c.real, c.imag]))
        return np.concatenate(xs)

    def normalize(self, x: np.ndarray) -> np.ndarray:
        out, off = [], 0
        for size in self.sizes:
            v = x[off:off + 2 * size]
            nrm = float(np.linalg.norm(v))
            out.append(v / nrm if nrm > 0 else v)
            off += 2 * size
        return np.concatenate(out)

    def unpack(self, x: np.ndarray) -> PolyTuple:
        polys, off = [], 0
        for size, support, k in zip(self.sizes, self.supports, self.cfg.degrees):
            re = x[off:off + size]
            im = x[off + size:off + 2 * size]
            polys.append(make_poly(self.cfg.num_vars, k, dict(zip(support, re + 1j * im))))
            off += 2 * size
        return PolyTuple(tuple(polys))


def _minimize_one(
    cfg: SearchConfig, restart: int
) -> tuple[PolyTuple, RatioReport, list, int]:
    space = _CoefficientSpace(cfg)
    start = PolyTuple(tuple(
        random_poly(
            cfg.num_vars, k, derived_seed(cfg.seed, restart, j), cfg.coef_distribution
        )
        for j, k in enumerate(cfg.degrees)
    ))
    x = space.normalize(space.pack(start))
    evals = 0
    cache: dict = {}

    def measure(params: np.ndarray) -> RatioReport | None:
        nonlocal evals
        evals += 1
        try:
            return ratio(space.unpack(params), cfg.p, cfg.norm_cfg, _factor_cache=cache)
        except InvalidArgs:
            return None

    best_rep = measure(x)
    assert best_rep is not None
    local_trace = [(evals, best_rep.ratio)]
    step = _PS_INIT_STEP
    dim = len(x)

    def snap_candidates(step_now: float):
        # Coordinate moves cannot descend a valley that couples small
        # coefficients across factors (zeroing one alone raises the ratio,
        # zeroing them together lowers it).  Probe the joint zeroing of every
        # coefficient below a few thresholds at once.
        for theta in (step_now, 4.0 * step_now, 0.1):
            y = x.copy()
            changed = False
            off = 0
            for size in space.sizes:
                re = y[off:off + size]
                im = y[off + size:off + 2 * size]
                small = np.hypot(re, im) < theta
                if small.all() or not small.any():
                    off += 2 * size
                    continue
                re[small] = 0.0
                im[small] = 0.0
                changed = True
                off += 2 * size
            if changed:
                yield y

    while step >= _PS_MIN_STEP and evals < cfg.max_evals:
        improved = False
        for i in range(dim):
            if evals >= cfg.max_evals:
                break
            for sign in (1.0, -1.0):
                y = x.copy()
                y[i] += sign * step
                rep = measure(y)
                if rep is not None and rep.ratio < best_rep.ratio:
                    x = space.normalize(y)
                    best_rep = rep
                    local_trace.append((evals, rep.ratio))
                    improved = True
                    break
                if evals >= cfg.max_evals:
                    break
        if not improved:
            for y in snap_candidates(step):
                if evals >= cfg.max_evals:
                    break
                rep = measure(y)
                if rep is not None and rep.ratio < best_rep.ratio:
                    x = space.normalize(y)
                    best_rep = rep
                    local_trace.append((evals, rep.ratio))
                    improved = True
                    break
        if not improved:
            step *= 0.5
    return space.unpack(x), best_rep, local_trace, evals


def minimize_ratio(cfg: SearchConfig, threads: int | None = None) -> SearchResult:
    """Derivative-free descent of the ratio from ``restarts`` random tuples.

    Each factor is rescaled to unit coefficient 2-norm after every accepted
    step (the ratio is exactly invariant under per-factor scaling, so this
    only removes the degeneracy).
    """
    results = _parallel_map(
        lambda r: _minimize_one(cfg, r), cfg.restarts, threads
    )
    reports = tuple(rep for _, rep, _, _ in results)
    best_i = min(range(len(results)), key=lambda i: reports[i].ratio)
    trace: list[tuple[int, float]] = []
    offset = 0
    for _, _, local, total in results:
        for count, r in local:
            if not trace or r < trace[-1][1]:
                trace.append((offset + count, r))
        offset += total
    flags = tuple(
        rep.ratio < rep.target * (1.0 - VIOLATION_REL_TOL) for rep in reports
    )
    return SearchResult(
        best_tuple=results[best_i][0],
        best_ratio=reports[best_i].ratio,
        trace=tuple(trace),
        reports=reports,
        seeds=tuple(derived_seed(cfg.seed, r) for r in range(cfg.restarts)),
        flags=flags,
    )
