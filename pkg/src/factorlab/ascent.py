"""Batched multi-start gradient ascent for polynomial sup-norm lower bounds.

The objective is the scale-invariant surrogate

    F(z) = log|P(z)|^2 - 2k * log||z||

over nonzero points z (2D real parameters packed as D complex numbers), so no
explicit sphere constraint is needed: F is exactly invariant under z -> lam*z.
The constraint norm is supplied by a model object so the same loop serves the
vector lp case and the Schatten case.  |.|^p terms are eps-smoothed inside the
model ((|z|^2 + eps)^(p/2) with eps = 1e-18); the final witness is renormalized
with the exact norm, so the reported value stays a true lower bound.

Gradients are packed as complex arrays gamma with dF/dx = Re(gamma) and
dF/dy = Im(gamma), so an ascent step is simply z += t * gamma.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .poly import HomogeneousPoly

SMOOTHING_EPS = 1e-18
ARMIJO_C = 1e-4
MAX_HALVINGS = 60
# Accepted steps that move F by less than this are float noise: the start is
# at a stationary point to machine precision and gets frozen.  Differences of
# F are scale-invariant, so a constant threshold is safe.
STALL_DF = 1e-13


class VectorPNormModel:
    """lp norm of a complex vector, smoothed for gradient ascent.

    ``norm`` also covers p = 1 and p = inf (used by the sampling oracle); the
    smoothed pieces are only meaningful for 1 < p < inf.
    """

    def __init__(self, p: float):
        self.p = float(p)

    def norm(self, Z: np.ndarray) -> np.ndarray:
        mods = np.abs(Z)
        if np.isinf(self.p):
            return mods.max(axis=-1)
        return np.sum(mods**self.p, axis=-1) ** (1.0 / self.p)

    def log_norm_eps(self, Z: np.ndarray) -> np.ndarray:
        s = np.sum((Z.real**2 + Z.imag**2 + SMOOTHING_EPS) ** (self.p / 2), axis=-1)
        return np.log(s) / self.p

    def grad_log_norm_eps(self, Z: np.ndarray) -> np.ndarray:
        r2 = Z.real**2 + Z.imag**2 + SMOOTHING_EPS
        w = r2 ** (self.p / 2 - 1.0)
        s = np.sum(r2 ** (self.p / 2), axis=-1, keepdims=True)
        return Z * w / s


class SchattenNormModel:
    """S_p norm of an m x m complex matrix given as its row-major vec."""

    def __init__(self, p: float, dim: int):
        self.p = float(p)
        self.dim = int(dim)

    def _mats(self, Z: np.ndarray) -> np.ndarray:
        return Z.reshape(Z.shape[0], self.dim, self.dim)

    def norm(self, Z: np.ndarray) -> np.ndarray:
        sv = np.linalg.svd(self._mats(Z), compute_uv=False)
        if np.isinf(self.p):
            return sv.max(axis=-1)
        return np.sum(sv**self.p, axis=-1) ** (1.0 / self.p)

    def log_norm_eps(self, Z: np.ndarray) -> np.ndarray:
        sv = np.linalg.svd(self._mats(Z), compute_uv=False)
        s = np.sum((sv**2 + SMOOTHING_EPS) ** (self.p / 2), axis=-1)
        return np.log(s) / self.p

    def grad_log_norm_eps(self, Z: np.ndarray) -> np.ndarray:
        U, sv, Vh = np.linalg.svd(self._mats(Z))
        w = sv * (sv**2 + SMOOTHING_EPS) ** (self.p / 2 - 1.0)
        s = np.sum((sv**2 + SMOOTHING_EPS) ** (self.p / 2), axis=-1)
        G = np.einsum("sij,sj,sjk->sik", U, w, Vh)
        return (G / s[:, None, None]).reshape(Z.shape)


@lru_cache(maxsize=64)
def _gaussian_starts_cached(num_starts: int, dim: int, seed: int) -> np.ndarray:
    children = np.random.SeedSequence(seed).spawn(num_starts)
    Z = np.empty((num_starts, dim), dtype=np.complex128)
    for s, child in enumerate(children):
        rng = np.random.default_rng(child)
        x = rng.standard_normal(dim)
        y = rng.standard_normal(dim)
        Z[s] = (x + 1j * y) / np.sqrt(2.0)
    Z.setflags(write=False)
    return Z


def gaussian_starts(num_starts: int, dim: int, seed: int) -> np.ndarray:
    """Standard complex Gaussian start points from per-start substreams.

    Each start has its own SeedSequence child, so the set of starts does not
    depend on how (or in what order) they are later processed.
    """
    return _gaussian_starts_cached(num_starts, dim, seed)


def _objective(P: HomogeneousPoly, model, Z: np.ndarray) -> np.ndarray:
    vals = P.eval_batch(Z)
    mod2 = vals.real**2 + vals.imag**2
    with np.errstate(divide="ignore"):
        return np.log(mod2) - 2.0 * P.degree * model.log_norm_eps(Z)


def _gradient(P: HomogeneousPoly, model, Z: np.ndarray) -> np.ndarray:
    vals = P.eval_batch(Z)
    dP = P.grad_batch(Z)
    with np.errstate(divide="ignore", invalid="ignore"):
        g_poly = 2.0 * np.conj(dP / vals[:, None])
    g_norm = 2.0 * P.degree * model.grad_log_norm_eps(Z)
    return g_poly - g_norm


def multi_start_ascent(
    P: HomogeneousPoly,
    model,
    starts: np.ndarray,
    max_iters: int,
    grad_tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Run all starts in lockstep; returns (final points, converged flags).

    A start is converged when the max-norm of its real gradient drops to
    ``grad_tol``.  Starts whose backtracking line search dies out (step below
    ~1e-18 with no Armijo-acceptable point) are frozen unconverged.
    """
    Z = starts.astype(np.complex128).copy()
    S = Z.shape[0]
    F = _objective(P, model, Z)
    active = np.isfinite(F)
    converged = np.zeros(S, dtype=bool)
    # Per-start warm-started step: reusing the last accepted step keeps the
    # halving count near one per iteration instead of rediscovering the local
    # stiffness (severe for p < 2) from t = 1 every time.
    t_warm = np.ones(S)

    for _ in range(max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        G = _gradient(P, model, Z[idx])
        bad = ~np.all(np.isfinite(G), axis=1)
        gmax = np.maximum(np.abs(G.real), np.abs(G.imag)).max(axis=1)
        done = (gmax <= grad_tol) & ~bad
        converged[idx[done]] = True
        active[idx[done | bad]] = False
        live = ~(done | bad)
        if not live.any():
            continue
        idx, G = idx[live], G[live]
        gsq = np.sum(G.real**2 + G.imag**2, axis=1)

        t = np.minimum(1.0, 2.0 * t_warm[idx])
        pending = np.ones(len(idx), dtype=bool)
        for _ in range(MAX_HALVINGS):
            trial = Z[idx[pending]] + t[pending, None] * G[pending]
            Ft = _objective(P, model, trial)
            ok = Ft >= F[idx[pending]] + ARMIJO_C * t[pending] * gsq[pending]
            ok &= np.isfinite(Ft)
            sub = np.flatnonzero(pending)
            acc = sub[ok]
            stalled = (Ft[ok] - F[idx[acc]]) <= STALL_DF
            Z[idx[acc]] = trial[ok]
            F[idx[acc]] = Ft[ok]
            t_warm[idx[acc]] = t[acc]
            active[idx[acc[stalled]]] = False
            pending[acc] = False
            t[sub[~ok]] *= 0.5
            if not pending.any():
                break
            if np.all(t[pending] < 1e-19):
                break
        # exhausted line searches: freeze those starts, unconverged
        active[idx[pending]] = False

    return Z, converged


def reduce_best(values: np.ndarray, witnesses: np.ndarray) -> int:
    """Index of the best start: max value, ties broken by lexicographically
    smallest (re, im)-flattened witness.  Order-independent by construction."""
    finite = np.where(np.isfinite(values), values, -np.inf)
    best = np.flatnonzero(finite == finite.max())
    if len(best) == 1:
        return int(best[0])
    keys = [
        tuple(np.stack([witnesses[i].real, witnesses[i].imag], axis=1).ravel())
        for i in best
    ]
    return int(best[min(range(len(keys)), key=keys.__getitem__)])
