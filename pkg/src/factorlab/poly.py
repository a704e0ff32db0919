"""Sparse complex homogeneous polynomials in N variables.

A polynomial is stored as a canonical tuple of (exponent-tuple, coefficient)
terms, all of the same total degree.  Values are immutable and hashable, so
they can be shared freely between concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegreeMismatch,
    DimensionMismatch,
    ExpansionTooLarge,
    IndexOutOfRange,
    InvalidArgs,
)

# Hard cap on the number of monomials any expansion is allowed to produce.
EXPANSION_GUARD = 10**6

MultiIndex = tuple[int, ...]
ComplexVector = tuple[complex, ...]


@dataclass(frozen=True)
class HomogeneousPoly:
    """A k-homogeneous polynomial in ``num_vars`` complex variables.

    ``terms`` is kept in canonical form: zero coefficients pruned and the
    exponent tuples in descending lexicographic order (graded-lex; all terms
    share one degree).  An empty ``terms`` tuple represents the zero
    polynomial of the given degree.
    """

    num_vars: int
    degree: int
    terms: tuple[tuple[MultiIndex, complex], ...] = field(default=())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def _exponent_matrix(self) -> np.ndarray:
        return np.array([e for e, _ in self.terms], dtype=np.int64).reshape(
            len(self.terms), self.num_vars
        )

    @cached_property
    def _coeff_vector(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=np.complex128)

    @cached_property
    def _partials(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-variable (exponents, coefficients) of d/dz_m, for gradients."""
        out = []
        E, c = self._exponent_matrix, self._coeff_vector
        for m in range(self.num_vars):
            mask = E[:, m] > 0
            Em = E[mask].copy()
            cm = c[mask] * Em[:, m]
            Em[:, m] -= 1
            out.append((Em, cm))
        return out

    def eval_batch(self, Z: np.ndarray) -> np.ndarray:
        """Evaluate at each row of a (batch, num_vars) complex array."""
        if Z.shape[-1] != self.num_vars:
            raise DimensionMismatch(
                f"points have {Z.shape[-1]} coordinates, polynomial has {self.num_vars}"
            )
        if not self.terms:
            return np.zeros(Z.shape[0], dtype=np.complex128)
        mono = np.prod(Z[:, None, :] ** self._exponent_matrix[None, :, :], axis=2)
        return mono @ self._coeff_vector

    def grad_batch(self, Z: np.ndarray) -> np.ndarray:
        """Complex partial derivatives dP/dz_m at each row of Z, shape (batch, num_vars)."""
        out = np.zeros_like(Z)
        for m, (Em, cm) in enumerate(self._partials):
            if len(cm):
                out[:, m] = np.prod(Z[:, None, :] ** Em[None, :, :], axis=2) @ cm
        return out

    def __call__(self, z: Sequence[complex]) -> complex:
        return evaluate(self, z)

    def __mul__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        return multiply(self, other)

    def __repr__(self) -> str:
        def mono(e):
            return "*".join(f"z{i + 1}^{p}" if p > 1 else f"z{i + 1}"
                            for i, p in enumerate(e) if p)
        body = " + ".join(f"({c})*{mono(e)}" for e, c in self.terms) or "0"
        return f"<{self.degree}-homogeneous in {self.num_vars} vars: {body}>"


def make_poly(
    num_vars: int,
    degree: int,
    terms: Mapping[Sequence[int], complex] | Iterable[tuple[Sequence[int], complex]],
) -> HomogeneousPoly:
    """Build a polynomial in canonical form.

    Accepts terms in any order; duplicate multi-indices are summed.  Exactly
    zero coefficients are pruned (no thresholding: near-zero products of
    doubles must survive untouched).
    """
    if num_vars < 1:
        raise InvalidArgs(f"num_vars must be >= 1, got {num_vars}")
    if degree < 1:
        raise InvalidArgs(f"degree must be >= 1, got {degree}")
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict[MultiIndex, complex] = {}
    for exps, coef in items:
        key = tuple(int(e) for e in exps)
        if len(key) != num_vars:
            raise DimensionMismatch(
                f"multi-index {key} has length {len(key)}, expected {num_vars}"
            )
        if any(e < 0 for e in key):
            raise InvalidArgs(f"negative exponent in {key}")
        if sum(key) != degree:
            raise DegreeMismatch(
                f"multi-index {key} has total degree {sum(key)}, expected {degree}"
            )
        acc[key] = acc.get(key, 0j) + complex(coef)
    canon = tuple(
        (e, acc[e]) for e in sorted(acc, reverse=True) if acc[e] != 0
    )
    return HomogeneousPoly(num_vars, degree, canon)


def evaluate(P: HomogeneousPoly, z: Sequence[complex]) -> complex:
    """P(z) as an exact double-precision sum of coefficient * monomial."""
    if len(z) != P.num_vars:
        raise DimensionMismatch(
            f"point has {len(z)} coordinates, polynomial has {P.num_vars}"
        )
    Z = np.asarray(z, dtype=np.complex128).reshape(1, P.num_vars)
    return complex(P.eval_batch(Z)[0])


def multiply(P: HomogeneousPoly, Q: HomogeneousPoly) -> HomogeneousPoly:
    if P.num_vars != Q.num_vars:
        raise DimensionMismatch(
            f"cannot multiply polynomials in {P.num_vars} and {Q.num_vars} variables"
        )
    acc: dict[MultiIndex, complex] = {}
    for ep, cp in P.terms:
        for eq, cq in Q.terms:
            key = tuple(a + b for a, b in zip(ep, eq))
            acc[key] = acc.get(key, 0j) + cp * cq
    return make_poly(P.num_vars, P.degree + Q.degree, acc)


def product(polys: Sequence[HomogeneousPoly]) -> HomogeneousPoly:
    """Left-to-right multiply chain P1*...*Pn."""
    if not polys:
        raise InvalidArgs("empty product")
    out = polys[0]
    for Q in polys[1:]:
        out = multiply(out, Q)
    return out


def coordinate_power(i: int, k: int, num_vars: int) -> HomogeneousPoly:
    """The monomial z_i^k (i is 1-based, as in the usual coordinate notation)."""
    if not 1 <= i <= num_vars:
        raise IndexOutOfRange(f"coordinate {i} not in 1..{num_vars}")
    if k < 1:
        raise InvalidArgs(f"power must be >= 1, got {k}")
    exps = [0] * num_vars
    exps[i - 1] = k
    return make_poly(num_vars, k, {tuple(exps): 1.0 + 0j})


def linear_form_power(g: Sequence[complex], k: int) -> HomogeneousPoly:
    """Multinomial expansion of (sum_m g_m z_m)^k."""
    if k < 1:
        raise InvalidArgs(f"power must be >= 1, got {k}")
    n = len(g)
    if n < 1:
        raise InvalidArgs("empty coefficient vector")
    n_terms = math.comb(n + k - 1, k)
    if n_terms > EXPANSION_GUARD:
        raise ExpansionTooLarge(
            f"expansion has {n_terms} monomials, guard is {EXPANSION_GUARD}"
        )
    gc = [complex(v) for v in g]
    kfact = math.factorial(k)
    acc: dict[MultiIndex, complex] = {}
    for combo in combinations_with_replacement(range(n), k):
        exps = [0] * n
        for idx in combo:
            exps[idx] += 1
        coef = kfact
        for e in exps:
            coef //= math.factorial(e)
        val = complex(coef)
        for idx, e in enumerate(exps):
            if e:
                val *= gc[idx] ** e
        key = tuple(exps)
        acc[key] = acc.get(key, 0j) + val
    return make_poly(n, k, acc)


def depends_only_on(P: HomogeneousPoly, index_set: Iterable[int]) -> bool:
    """True iff every stored monomial uses only variables in ``index_set`` (1-based)."""
    allowed = set(index_set)
    if not allowed <= set(range(1, P.num_vars + 1)):
        raise IndexOutOfRange(f"index set {sorted(allowed)} not within 1..{P.num_vars}")
    return all(
        all(e == 0 or (i + 1) in allowed for i, e in enumerate(exps))
        for exps, _ in P.terms
    )


def embed(P: HomogeneousPoly, new_num_vars: int) -> HomogeneousPoly:
    """Zero-pad multi-indices so P lives in a larger coordinate space."""
    if new_num_vars < P.num_vars:
        raise DimensionMismatch(
            f"cannot embed {P.num_vars}-variable polynomial into {new_num_vars} variables"
        )
    pad = (0,) * (new_num_vars - P.num_vars)
    return HomogeneousPoly(
        new_num_vars, P.degree, tuple((e + pad, c) for e, c in P.terms)
    )


def all_multi_indices(num_vars: int, degree: int) -> list[MultiIndex]:
    """Every exponent tuple of the given total degree, in canonical order."""
    out = []
    for combo in combinations_with_replacement(range(num_vars), degree):
        exps = [0] * num_vars
        for idx in combo:
            exps[idx] += 1
        out.append(tuple(exps))
    return sorted(out, reverse=True)


def poly_to_json(P: HomogeneousPoly) -> dict:
    return {
        "num_vars": P.num_vars,
        "degree": P.degree,
        "terms": [
            {"exponents": list(e), "coef": {"re": c.real, "im": c.imag}}
            for e, c in P.terms
        ],
    }


def poly_from_json(obj: Mapping) -> HomogeneousPoly:
    try:
        num_vars = int(obj["num_vars"])
        degree = int(obj["degree"])
        terms = [
            (tuple(t["exponents"]), complex(t["coef"]["re"], t["coef"]["im"]))
            for t in obj["terms"]
        ]
    except (KeyError, TypeError) as exc:
        raise InvalidArgs(f"malformed polynomial JSON: {exc}") from exc
    return make_poly(num_vars, degree, terms)
