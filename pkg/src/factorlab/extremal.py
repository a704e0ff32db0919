"""Constructions attaining equality in the factor inequality, and their certificates.

Exact certification recognizes the two shapes with closed-form sup-norms
(monomials and powers of a single linear form); anything else must go through
the numerical estimator.  The roots-of-unity system gets its own certificate:
an explicit unitary change of variables turns the product into a monomial,
which pins its Hilbert-sphere norm exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import DegreeList, p_constant
from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    ExactFormUnavailable,
    ExpansionTooLarge,
    InvalidArgs,
    NotNormalized,
    SupportOverlap,
)
from .norms import (
    EstimatorConfig,
    dual_exponent,
    estimate_sup_norm,
    linear_power_norm_exact,
    monomial_norm_exact,
    vector_p_norm,
)
from .poly import (
    EXPANSION_GUARD,
    HomogeneousPoly,
    coordinate_power,
    linear_form_power,
    make_poly,
    multiply,
    product,
)


@dataclass(frozen=True)
class PolyTuple:
    """Factors P_1..P_n over a common coordinate space."""

    polys: tuple[HomogeneousPoly, ...]

    def __post_init__(self):
        if not self.polys:
            raise InvalidArgs("empty polynomial tuple")
        nv = self.polys[0].num_vars
        if any(P.num_vars != nv for P in self.polys):
            raise DimensionMismatch("tuple factors live in different coordinate spaces")

    @property
    def num_vars(self) -> int:
        return self.polys[0].num_vars

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(P.degree for P in self.polys)


@dataclass(frozen=True)
class RatioReport:
    """One sample of the quotient ||prod P_i|| / prod ||P_i|| vs a target constant."""

    product_norm: float
    factor_norms: tuple[float, ...]
    ratio: float
    target: float
    slack: float
    method: str
    converged: bool = True

    def to_json(self) -> dict:
        return {
            "product_norm": self.product_norm,
            "factor_norms": list(self.factor_norms),
            "ratio": self.ratio,
            "target": self.target,
            "slack": self.slack,
            "method": self.method,
            "converged": self.converged,
        }


def coordinate_tuple(ks: Sequence[int] | DegreeList, num_vars: int) -> PolyTuple:
    """The extremal tuple (z_1^{k_1}, ..., z_n^{k_n}) in ``num_vars`` variables."""
    degs = ks.ks if isinstance(ks, DegreeList) else DegreeList(tuple(ks)).ks
    if num_vars < len(degs):
        raise DimensionTooSmall(
            f"need at least {len(degs)} variables for {len(degs)} factors, got {num_vars}"
        )
    return PolyTuple(tuple(
        coordinate_power(i + 1, k, num_vars) for i, k in enumerate(degs)
    ))


def roots_of_unity_forms(n: int, num_vars: int) -> list[tuple[complex, ...]]:
    """Linear forms g_j = (e^{2 pi i m j / N})_{m=0..N-1}, j = 1..n.

    Pairwise Hermitian-orthogonal with ||g_j||_2 = sqrt(N) whenever n <= N.
    """
    if not 1 <= n <= num_vars:
        raise InvalidArgs(f"need 1 <= n <= num_vars, got n={n}, num_vars={num_vars}")
    N = num_vars
    m = np.arange(N)
    return [
        tuple(np.exp(2j * np.pi * m * j / N))
        for j in range(1, n + 1)
    ]


def splitting_witness(
    x0: Sequence[complex], y0: Sequence[complex], k: int, l: int, p: float
) -> tuple[complex, ...]:
    """The unit vector (k/(k+l))^{1/p} x0 + (l/(k+l))^{1/p} y0 gluing two
    disjointly supported norming points into one for the product."""
    x = np.asarray(x0, dtype=np.complex128)
    y = np.asarray(y0, dtype=np.complex128)
    if x.shape != y.shape:
        raise DimensionMismatch(f"witness parts have shapes {x.shape} and {y.shape}")
    if np.any((x != 0) & (y != 0)):
        raise SupportOverlap("x0 and y0 must have disjoint supports")
    for name, v in (("x0", x), ("y0", y)):
        nrm = vector_p_norm(v, p)
        if abs(nrm - 1.0) > 1e-9:
            raise NotNormalized(f"{name} has lp norm {nrm}, expected 1")
    if k < 1 or l < 1:
        raise InvalidArgs(f"degrees must be >= 1, got k={k}, l={l}")
    inv_p = 0.0 if math.isinf(p) else 1.0 / float(p)
    wx = (k / (k + l)) ** inv_p
    wy = (l / (k + l)) ** inv_p
    return tuple(wx * x + wy * y)


_PROBE_POINTS = (0.7317, 0.2843)  # angle seeds for deterministic generic probes


def _probe(num_vars: int, which: int) -> np.ndarray:
    t = _PROBE_POINTS[which]
    m = np.arange(1, num_vars + 1)
    return (1.0 + 0.3 * np.cos(t * m)) * np.exp(1j * (t * m * m + 0.1))


def recognize_linear_power(P: HomogeneousPoly):
    """If P = c * (g . z)^k, return (c, g) with ||g||_2 = 1; else None.

    The gradient of such a P at any generic point is proportional to g; the
    candidate is then verified coefficient-by-coefficient.
    """
    if P.is_zero:
        return None
    k = P.degree
    scale = max(abs(c) for _, c in P.terms)
    for which in range(len(_PROBE_POINTS)):
        z = _probe(P.num_vars, which).reshape(1, -1)
        v = P.grad_batch(z)[0]
        vnorm = np.linalg.norm(v)
        if vnorm < 1e-12 * scale:
            continue
        g = v / vnorm
        s = complex(np.dot(g, z[0]))
        if abs(s) < 1e-10:
            continue
        c = complex(P.eval_batch(z)[0]) / s**k
        candidate = linear_form_power(g, k)
        cand_terms = {e: c * v for e, v in candidate.terms}
        keys = {e for e, _ in P.terms} | set(cand_terms)
        err = max(
            abs(dict(P.terms).get(e, 0j) - cand_terms.get(e, 0j)) for e in keys
        )
        if err <= 1e-9 * scale:
            return c, tuple(g)
        return None
    return None


def exact_sup_norm(P: HomogeneousPoly, p: float) -> float:
    """Closed-form sup-norm for a monomial or a power of a linear form.

    Raises ExactFormUnavailable on any other shape.
    """
    if P.is_zero:
        raise InvalidArgs("zero polynomial")
    if len(P.terms) == 1:
        exps, c = P.terms[0]
        return abs(c) * monomial_norm_exact([e for e in exps if e], p)
    rec = recognize_linear_power(P)
    if rec is not None:
        c, g = rec
        return abs(c) * linear_power_norm_exact(g, P.degree, p)
    raise ExactFormUnavailable(
        "no closed form: not a monomial or a power of a linear form"
    )


def exact_norm_estimate(P: HomogeneousPoly, p: float) -> "NormEstimate":
    """Closed-form norm packaged with an explicit attaining witness."""
    from .norms import NormEstimate, dual_witness

    if P.is_zero:
        raise InvalidArgs("zero polynomial")
    if len(P.terms) == 1:
        exps, c = P.terms[0]
        value = abs(c) * monomial_norm_exact([e for e in exps if e], p)
        if math.isinf(p):
            w = np.array([1.0 if e else 0.0 for e in exps], dtype=np.complex128)
        else:
            total = P.degree
            w = np.array(
                [(e / total) ** (1.0 / p) if e else 0.0 for e in exps],
                dtype=np.complex128,
            )
        witness = tuple(w)
    else:
        rec = recognize_linear_power(P)
        if rec is None:
            raise ExactFormUnavailable(
                "no closed form: not a monomial or a power of a linear form"
            )
        c, g = rec
        value = abs(c) * linear_power_norm_exact(g, P.degree, p)
        witness = dual_witness(g, p)
    return NormEstimate(
        value=value, witness=witness, starts_used=0, converged=True, spread=0.0
    )


def certify_equality(
    t: PolyTuple,
    p: float,
    mode: str = "exact",
    cfg: EstimatorConfig | None = None,
) -> RatioReport:
    """Measure the tuple's ratio against the sharp disjoint-variables constant.

    mode="exact" uses closed-form norms and demands recognizable shapes for
    every factor and the product; mode="estimated" runs the ascent estimator
    on each of them (1 < p < inf only).
    """
    target = p_constant(t.degrees, p)
    prod_poly = product(t.polys)
    if mode == "exact":
        factor_norms = tuple(exact_sup_norm(P, p) for P in t.polys)
        product_norm = exact_sup_norm(prod_poly, p)
        converged = True
    elif mode == "estimated":
        cfg = cfg or EstimatorConfig()
        ests = [estimate_sup_norm(P, p, cfg) for P in t.polys]
        pe = estimate_sup_norm(prod_poly, p, cfg)
        factor_norms = tuple(e.value for e in ests)
        product_norm = pe.value
        converged = pe.converged and all(e.converged for e in ests)
    else:
        raise InvalidArgs(f"mode must be 'exact' or 'estimated', got {mode!r}")
    denom = math.prod(factor_norms)
    ratio = product_norm / denom
    return RatioReport(
        product_norm=product_norm,
        factor_norms=factor_norms,
        ratio=ratio,
        target=target,
        slack=ratio - target,
        method=mode,
        converged=converged,
    )


def substitute_linear(P: HomogeneousPoly, A: np.ndarray) -> HomogeneousPoly:
    """The polynomial w -> P(A w); A maps new coordinates to old ones."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != P.num_vars:
        raise DimensionMismatch(
            f"substitution matrix has shape {A.shape}, expected ({P.num_vars}, *)"
        )
    new_vars = A.shape[1]
    if math.comb(new_vars + P.degree - 1, P.degree) > EXPANSION_GUARD:
        raise ExpansionTooLarge("substituted polynomial would exceed the term guard")
    acc: dict[tuple[int, ...], complex] = {}
    for exps, c in P.terms:
        piece: HomogeneousPoly | None = None
        for m, e in enumerate(exps):
            if e:
                f = linear_form_power(A[m], e)
                piece = f if piece is None else multiply(piece, f)
        assert piece is not None
        for te, tc in piece.terms:
            acc[te] = acc.get(te, 0j) + c * tc
    return make_poly(new_vars, P.degree, acc)


def _complete_unitary(rows: np.ndarray) -> np.ndarray:
    """Extend orthonormal rows to a full unitary by Gram-Schmidt over e_i."""
    n, N = rows.shape
    basis = [rows[j] for j in range(n)]
    for i in range(N):
        if len(basis) == N:
            break
        v = np.zeros(N, dtype=np.complex128)
        v[i] = 1.0
        for _ in range(2):  # reorthogonalize once for stability
            for b in basis:
                v = v - np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            basis.append(v / nrm)
    if len(basis) != N:
        raise InvalidArgs("could not complete unitary basis")
    return np.array(basis)


@dataclass(frozen=True)
class RotationCertificate:
    """Exact Hilbert-sphere norm of a roots-of-unity product, via rotation."""

    gram_error: float
    rotation_residual: float
    l2_product_norm: float
    l2_ratio: float
    lp_report: RatioReport | None


def certify_roots_of_unity(
    ks: Sequence[int] | DegreeList,
    num_vars: int,
    p: float | None = None,
    cfg: EstimatorConfig | None = None,
) -> RotationCertificate:
    """Certify || prod g_j^{k_j} ||_{l2} = N^{k/2} * hilbert * prod N^{k_j/2} / ... exactly.

    Rotating with the unitary whose first rows are g_j/sqrt(N) sends the
    product onto N^{k/2} w_1^{k_1}...w_n^{k_n}; the residual measures how far
    the rotated coefficients are from that monomial.  If ``p`` is given, an
    lp RatioReport is included (factor norms exact by duality, product norm
    estimated).
    """
    degs = ks.ks if isinstance(ks, DegreeList) else DegreeList(tuple(ks)).ks
    n, N = len(degs), num_vars
    total = sum(degs)
    gs = roots_of_unity_forms(n, N)
    G = np.array(gs)
    gram = G @ G.conj().T
    gram_error = float(np.max(np.abs(gram - N * np.eye(n))))

    factors = [linear_form_power(g, k) for g, k in zip(gs, degs)]
    prod_poly = product(factors)

    V = _complete_unitary(G / math.sqrt(N))
    rotated = substitute_linear(prod_poly, V.conj().T)
    target_exps = tuple(degs) + (0,) * (N - n)
    scale = float(N) ** (total / 2.0)
    residual = 0.0
    for exps, c in rotated.terms:
        expect = scale if exps == target_exps else 0.0
        residual = max(residual, abs(c - expect) / scale)

    l2_norm = scale * monomial_norm_exact(degs, 2.0)
    l2_ratio = l2_norm / math.prod(
        linear_power_norm_exact(g, k, 2.0) for g, k in zip(gs, degs)
    )

    lp_report = None
    if p is not None:
        cfg = cfg or EstimatorConfig()
        factor_norms = tuple(
            linear_power_norm_exact(g, k, p) for g, k in zip(gs, degs)
        )
        est = estimate_sup_norm(prod_poly, p, cfg)
        ratio = est.value / math.prod(factor_norms)
        target = p_constant(degs, p)
        lp_report = RatioReport(
            product_norm=est.value,
            factor_norms=factor_norms,
            ratio=ratio,
            target=target,
            slack=ratio - target,
            method="estimated",
            converged=est.converged,
        )
    return RotationCertificate(
        gram_error=gram_error,
        rotation_residual=residual,
        l2_product_norm=l2_norm,
        l2_ratio=l2_ratio,
        lp_report=lp_report,
    )
