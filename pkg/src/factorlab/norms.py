"""Vector lp norms, closed-form polynomial sup-norms, and numerical estimators.

Closed forms cover the two shapes with known exact sup-norms on the complex
lp sphere: monomials (via the weight formula prod (k_i/k)^(k_i/p)) and powers
of a linear form (via the dual norm).  Everything else goes through
``estimate_sup_norm`` (smooth multi-start ascent, 1 < p < inf) or
``brute_force_norm`` (sampling plus coordinate polish, any p >= 1), both of
which return certified lower bounds: the value is |P| at a feasible point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import ascent
from .errors import InvalidArgs, InvalidExponent
from .poly import HomogeneousPoly

PExponent = float


@dataclass(frozen=True)
class EstimatorConfig:
    num_starts: int = 64
    max_iters: int = 500
    grad_tol: float = 1e-10
    seed: int = 42

    def __post_init__(self):
        if self.num_starts < 1 or self.max_iters < 1 or self.grad_tol <= 0:
            raise InvalidArgs(f"bad estimator config: {self}")


@dataclass(frozen=True)
class NormEstimate:
    """A certified lower bound: value = |P(witness)| with ||witness|| = 1."""

    value: float
    witness: tuple[complex, ...]
    starts_used: int
    converged: bool
    spread: float

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "witness": [{"re": w.real, "im": w.imag} for w in self.witness],
            "starts_used": self.starts_used,
            "converged": self.converged,
            "spread": self.spread,
        }


def _check_p(p: float, minimum: float = 1.0) -> float:
    p = float(p)
    if math.isnan(p) or p < minimum:
        raise InvalidExponent(f"exponent p={p} is not >= {minimum}")
    return p


def vector_p_norm(z: Sequence[complex], p: PExponent) -> float:
    """(sum |z_m|^p)^(1/p); p = inf gives the max modulus."""
    p = _check_p(p)
    mods = np.abs(np.asarray(z, dtype=np.complex128))
    if math.isinf(p):
        return float(mods.max()) if mods.size else 0.0
    return float(np.sum(mods**p) ** (1.0 / p))


def dual_exponent(p: PExponent) -> float:
    """Conjugate exponent q with 1/p + 1/q = 1 (p=1 -> inf, p=inf -> 1)."""
    p = _check_p(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def monomial_norm_exact(exponents: Sequence[int], p: PExponent) -> float:
    """Exact sup of prod |z_i|^{k_i} over the unit lp sphere.

    The optimal modulus pattern puts weight k_i/k on coordinate i (Lagrange
    multipliers on the p-th power constraint), giving prod (k_i/k)^(k_i/p).
    Evaluated in log-space to survive large degrees.
    """
    p = _check_p(p)
    ks = [int(k) for k in exponents]
    if not ks or any(k < 1 for k in ks):
        raise InvalidArgs(f"exponents must all be >= 1, got {list(exponents)}")
    if math.isinf(p):
        return 1.0
    total = sum(ks)
    log_val = sum(k * (math.log(k) - math.log(total)) for k in ks) / p
    return math.exp(log_val)


def linear_power_norm_exact(g: Sequence[complex], k: int, p: PExponent) -> float:
    """||(g . z)^k|| on the lp sphere = (||g||_q)^k with q the dual exponent."""
    if k < 1:
        raise InvalidArgs(f"power must be >= 1, got {k}")
    q = dual_exponent(p)
    return vector_p_norm(g, q) ** k


def two_block_sup(k: int, l: int, p: PExponent) -> float:
    """sup { |a|^k |b|^l : |a|^p + |b|^p = 1 } = (k^k l^l / (k+l)^(k+l))^(1/p)."""
    p = _check_p(p)
    if k < 1 or l < 1:
        raise InvalidArgs(f"block degrees must be >= 1, got k={k}, l={l}")
    if math.isinf(p):
        return 1.0
    log_val = k * math.log(k) + l * math.log(l) - (k + l) * math.log(k + l)
    return math.exp(log_val / p)


def dual_witness(g: Sequence[complex], p: PExponent) -> tuple[complex, ...]:
    """Unit-lp-norm z maximizing |g . z|, i.e. attaining ||g||_q."""
    p = _check_p(p)
    arr = np.asarray(g, dtype=np.complex128)
    mods = np.abs(arr)
    if not mods.any():
        raise InvalidArgs("zero vector has no dual witness")
    if p == 1.0:
        z = np.zeros_like(arr)
        i = int(np.argmax(mods))
        z[i] = np.conj(arr[i]) / mods[i]
        return tuple(z)
    q = dual_exponent(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(mods > 0, np.conj(arr) * mods ** (q - 2.0), 0.0)
    nrm = vector_p_norm(z, p)
    return tuple(z / nrm)


def _finish_estimate(
    P: HomogeneousPoly, model, Z: np.ndarray, converged: np.ndarray
) -> NormEstimate:
    nrm = model.norm(Z)
    with np.errstate(invalid="ignore", divide="ignore"):
        W = Z / nrm[:, None]
    # Snap near-dead coordinates to exact zero where that helps: for p < 2 the
    # ascent approaches optima on coordinate faces only sublinearly, and the
    # residual mass inflates the constraint norm.  Keeping the better of the
    # two feasible points preserves the lower-bound guarantee.
    mods = np.abs(W)
    tiny = mods <= 1e-3 * mods.max(axis=1, keepdims=True)
    if tiny.any():
        Zs = np.where(tiny, 0.0, W)
        ns = model.norm(Zs)
        ok = ns > 0
        Ws = np.where(ok[:, None], Zs / np.where(ok, ns, 1.0)[:, None], W)
        better = np.abs(P.eval_batch(Ws)) > np.abs(P.eval_batch(W))
        W = np.where(better[:, None], Ws, W)
    vals = np.abs(P.eval_batch(W))
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    best = ascent.reduce_best(vals, W)
    conv_vals = vals[converged & (vals > -np.inf)]
    spread = float(conv_vals.max() - conv_vals.min()) if conv_vals.size else 0.0
    # The smoothed p < 2 objective is stiff near coordinate faces, which can
    # stall the shared line-search step before the free coordinates settle; a
    # short derivative-free polish of the winning witness removes that bias.
    value, witness = float(vals[best]), W[best]
    if np.isfinite(value):
        polished = coordinate_polish(P, model, witness, step=1e-2)
        pv = float(np.abs(P.eval_batch(polished.reshape(1, -1))[0]))
        if pv > value:
            value, witness = pv, polished
    return NormEstimate(
        value=value,
        witness=tuple(witness),
        starts_used=Z.shape[0],
        converged=bool(converged[best]),
        spread=spread,
    )


def estimate_sup_norm(
    P: HomogeneousPoly, p: PExponent, cfg: EstimatorConfig | None = None
) -> NormEstimate:
    """Multi-start gradient ascent lower bound for ||P|| on the lp sphere.

    Maximizes the scale-invariant objective log|P(z)|^2 - 2k log||z||_p over
    nonzero z; requires 1 < p < inf (use ``brute_force_norm`` at p = 1 or
    p = inf, where the sphere has corners and the ascent breaks down).
    """
    cfg = cfg or EstimatorConfig()
    p = float(p)
    if math.isinf(p) or p <= 1.0:
        raise InvalidExponent(f"estimator needs 1 < p < inf, got {p}")
    if P.is_zero:
        raise InvalidArgs("cannot estimate the norm of the zero polynomial")
    model = ascent.VectorPNormModel(p)
    starts = ascent.gaussian_starts(cfg.num_starts, P.num_vars, cfg.seed)
    Z, converged = ascent.multi_start_ascent(
        P, model, starts, cfg.max_iters, cfg.grad_tol
    )
    return _finish_estimate(P, model, Z, converged)


_POLISH_INIT_STEP = 0.1
_POLISH_MIN_STEP = 1e-6
_SAMPLE_CHUNK = 8192


def _normalized_abs(P: HomogeneousPoly, model, Z: np.ndarray) -> np.ndarray:
    nrm = model.norm(Z)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.abs(P.eval_batch(Z)) / nrm**P.degree
    return np.where(nrm > 0, vals, -np.inf)


def coordinate_polish(
    P: HomogeneousPoly, model, z0: np.ndarray,
    step: float = _POLISH_INIT_STEP, min_step: float = _POLISH_MIN_STEP,
) -> np.ndarray:
    """Pattern search on the 2N real coordinates of |P(z)| / ||z||^k.

    Gradient-free, so it works on the l1 and linf spheres too.  Each sweep
    evaluates all +-step moves in one batch and takes the best; the step is
    halved when no move improves.
    """
    n = len(z0)
    z = z0 / model.norm(z0.reshape(1, n))[0]
    best = float(_normalized_abs(P, model, z.reshape(1, n))[0])
    deltas = np.concatenate([np.eye(n), 1j * np.eye(n), -np.eye(n), -1j * np.eye(n)])
    while step >= min_step:
        cand = z[None, :] + step * deltas
        vals = _normalized_abs(P, model, cand)
        i = int(np.argmax(vals))
        # demand a real relative gain: bare > lets float noise on the flat
        # phase directions drive an endless accept-walk
        if vals[i] > best * (1.0 + 1e-12):
            z, best = cand[i], float(vals[i])
        else:
            step *= 0.5
    return z / model.norm(z.reshape(1, n))[0]


def sample_and_polish(
    P: HomogeneousPoly, model, num_samples: int, seed: int
) -> NormEstimate:
    """Best of |P(z)|/||z||^k over Gaussian draws, then a coordinate polish."""
    if P.is_zero:
        raise InvalidArgs("cannot estimate the norm of the zero polynomial")
    if num_samples < 1:
        raise InvalidArgs(f"num_samples must be >= 1, got {num_samples}")
    rng = np.random.default_rng(seed)
    n = P.num_vars
    best_val, best_z = -np.inf, None
    remaining = int(num_samples)
    while remaining > 0:
        m = min(remaining, _SAMPLE_CHUNK)
        Z = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)
        vals = _normalized_abs(P, model, Z)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_z = float(vals[i]), Z[i]
        remaining -= m
    witness = coordinate_polish(P, model, best_z)
    value = float(np.abs(P.eval_batch(witness.reshape(1, n))[0]))
    return NormEstimate(
        value=value,
        witness=tuple(witness),
        starts_used=int(num_samples),
        converged=True,
        spread=0.0,
    )


def brute_force_norm(
    P: HomogeneousPoly, p: PExponent, num_samples: int, seed: int
) -> NormEstimate:
    """Sampling oracle for the lp sup-norm, independent of the ascent path;
    valid for every p >= 1 including inf.  Deterministic given the seed."""
    p = _check_p(p)
    return sample_and_polish(P, ascent.VectorPNormModel(p), num_samples, seed)
