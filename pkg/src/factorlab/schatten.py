"""Schatten-class geometry at small matrix dimension.

Matrices are plain complex ndarrays; polynomials on matrix space are ordinary
``HomogeneousPoly`` values over the m*m row-major vec of the entries.  The
block structure a coordinate partition induces (pinching) is the matrix
analogue of factors depending on different variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import ascent
from .errors import DimensionMismatch, InvalidArgs, InvalidExponent
from .norms import EstimatorConfig, NormEstimate, _finish_estimate, sample_and_polish
from .poly import HomogeneousPoly, coordinate_power, embed

# Singular values below this multiple of the largest are treated as zero, for
# stability of sigma^p at small p.
_SV_CUTOFF = 1e-13


@dataclass(frozen=True)
class ProjectionPair:
    """A partition of the coordinates 0..m-1 into two nonempty blocks."""

    first: tuple[int, ...]
    second: tuple[int, ...]

    def __post_init__(self):
        a, b = set(self.first), set(self.second)
        if not a or not b:
            raise InvalidArgs("both blocks must be nonempty")
        if a & b:
            raise InvalidArgs(f"blocks overlap: {sorted(a & b)}")
        m = len(a) + len(b)
        if a | b != set(range(m)):
            raise InvalidArgs("blocks must partition 0..m-1")

    @property
    def dim(self) -> int:
        return len(self.first) + len(self.second)

    @classmethod
    def split(cls, dim: int, cut: int) -> "ProjectionPair":
        if not 1 <= cut < dim:
            raise InvalidArgs(f"cut {cut} not in 1..{dim - 1}")
        return cls(tuple(range(cut)), tuple(range(cut, dim)))


def _as_matrix(A: Sequence[Sequence[complex]] | np.ndarray) -> np.ndarray:
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M.view(np.float64))):
        raise InvalidArgs("matrix entries must be finite")
    return M


def schatten_norm(A: Sequence[Sequence[complex]] | np.ndarray, p: float) -> float:
    """lp norm of the singular value vector; p = inf gives the operator norm."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"exponent p={p} is not >= 1")
    sv = np.linalg.svd(_as_matrix(A), compute_uv=False)
    if sv[0] > 0 and p < 1.5:
        sv = np.where(sv < _SV_CUTOFF * sv[0], 0.0, sv)
    if math.isinf(p):
        return float(sv[0])
    return float(np.sum(sv**p) ** (1.0 / p))


def pinch(A: np.ndarray, pp: ProjectionPair) -> np.ndarray:
    """Block-diagonal compression pi1 A pi1 + pi2 A pi2."""
    M = _as_matrix(A)
    if M.shape[0] != pp.dim:
        raise DimensionMismatch(f"matrix is {M.shape[0]}x{M.shape[0]}, partition covers {pp.dim}")
    out = np.zeros_like(M)
    for block in (pp.first, pp.second):
        idx = np.array(block)
        out[np.ix_(idx, idx)] = M[np.ix_(idx, idx)]
    return out


def _corner(A: np.ndarray, block: tuple[int, ...]) -> np.ndarray:
    idx = np.array(block)
    return A[np.ix_(idx, idx)]


def pinching_checks(
    A: np.ndarray, pp: ProjectionPair, p: float, tol: float = 1e-9
) -> tuple[bool, bool]:
    """Verify the two pinching facts at this matrix:

    additivity   ||pi1 A pi1||^p + ||pi2 A pi2||^p == ||pinch(A)||^p
    contraction  that sum is at most ||A||^p
    """
    p = float(p)
    if math.isinf(p):
        raise InvalidExponent("pinching additivity is stated for finite p")
    a = schatten_norm(_corner(A, pp.first), p) ** p
    b = schatten_norm(_corner(A, pp.second), p) ** p
    pinched = schatten_norm(pinch(A, pp), p) ** p
    whole = schatten_norm(A, p) ** p
    additivity = abs((a + b) - pinched) <= tol
    contraction = (a + b) <= whole + tol
    return additivity, contraction


def entry_power(i: int, j: int, k: int, dim: int) -> HomogeneousPoly:
    """The polynomial A -> (A_ij)^k on dim x dim matrices (i, j are 1-based)."""
    if not (1 <= i <= dim and 1 <= j <= dim):
        raise InvalidArgs(f"entry ({i},{j}) outside a {dim}x{dim} matrix")
    return coordinate_power((i - 1) * dim + j, k, dim * dim)


def matrix_poly_sup(
    P: HomogeneousPoly, p: float, dim: int, cfg: EstimatorConfig | None = None
) -> NormEstimate:
    """Multi-start ascent lower bound for sup |P(A)| over the S_p unit sphere.

    P lives on the m*m row-major vec of the matrix; the witness in the
    estimate is that vec at unit S_p norm.
    """
    cfg = cfg or EstimatorConfig()
    p = float(p)
    if math.isinf(p) or p <= 1.0:
        raise InvalidExponent(f"estimator needs 1 < p < inf, got {p}")
    if P.num_vars != dim * dim:
        raise DimensionMismatch(
            f"polynomial has {P.num_vars} variables, expected {dim * dim}"
        )
    if P.is_zero:
        raise InvalidArgs("cannot estimate the norm of the zero polynomial")
    model = ascent.SchattenNormModel(p, dim)
    starts = ascent.gaussian_starts(cfg.num_starts, dim * dim, cfg.seed)
    Z, converged = ascent.multi_start_ascent(P, model, starts, cfg.max_iters, cfg.grad_tol)
    return _finish_estimate(P, model, Z, converged)


def brute_force_matrix_norm(
    P: HomogeneousPoly, p: float, dim: int, num_samples: int, seed: int
) -> NormEstimate:
    """Sampling oracle over Gaussian matrices, any p >= 1 including inf."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"exponent p={p} is not >= 1")
    if P.num_vars != dim * dim:
        raise DimensionMismatch(
            f"polynomial has {P.num_vars} variables, expected {dim * dim}"
        )
    return sample_and_polish(P, ascent.SchattenNormModel(p, dim), num_samples, seed)


def embed_matrix(A: np.ndarray, new_dim: int) -> np.ndarray:
    """Extend by zero rows/columns: the orthogonal-sum padding of the space."""
    M = _as_matrix(A)
    m = M.shape[0]
    if new_dim < m:
        raise DimensionMismatch(f"cannot embed {m}x{m} into {new_dim}x{new_dim}")
    out = np.zeros((new_dim, new_dim), dtype=np.complex128)
    out[:m, :m] = M
    return out


def embed_matrix_poly(P: HomogeneousPoly, dim: int, new_dim: int) -> HomogeneousPoly:
    """Reindex a polynomial on m x m matrices to live on larger matrices, so
    that its value on a zero-padded matrix is unchanged."""
    if P.num_vars != dim * dim:
        raise DimensionMismatch(
            f"polynomial has {P.num_vars} variables, expected {dim * dim}"
        )
    if new_dim < dim:
        raise DimensionMismatch(f"cannot embed dim {dim} into {new_dim}")
    if new_dim == dim:
        return P
    terms = []
    for exps, c in P.terms:
        new_exps = [0] * (new_dim * new_dim)
        for v, e in enumerate(exps):
            if e:
                i, j = divmod(v, dim)
                new_exps[i * new_dim + j] = e
        terms.append((tuple(new_exps), c))
    from .poly import make_poly

    return make_poly(new_dim * new_dim, P.degree, terms)


def haar_unitary(dim: int, seed: int) -> np.ndarray:
    """Random unitary via QR of a complex Gaussian matrix (phase-fixed)."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def matrix_to_json(A: np.ndarray) -> dict:
    M = _as_matrix(A)
    return {
        "dim": M.shape[0],
        "entries": [{"re": v.real, "im": v.imag} for v in M.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        flat = [complex(e["re"], e["im"]) for e in obj["entries"]]
    except (KeyError, TypeError) as exc:
        raise InvalidArgs(f"malformed matrix JSON: {exc}") from exc
    if len(flat) != dim * dim:
        raise DimensionMismatch(f"{len(flat)} entries for a {dim}x{dim} matrix")
    return np.array(flat, dtype=np.complex128).reshape(dim, dim)
