"""Analytic constants for the factor problem, as pure formulas.

All exponentials are taken in log-space: k^k overflows doubles well before the
degree lists this package accepts stop making sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidArgs, InvalidExponent


@dataclass(frozen=True)
class DegreeList:
    """Degrees k_1..k_n of the polynomial factors."""

    ks: tuple[int, ...]

    def __post_init__(self):
        if not self.ks or any(k < 1 for k in self.ks):
            raise InvalidArgs(f"degrees must be a nonempty list of ints >= 1: {self.ks}")

    @property
    def n(self) -> int:
        return len(self.ks)

    @property
    def total(self) -> int:
        return sum(self.ks)

    @classmethod
    def parse(cls, text: str) -> "DegreeList":
        try:
            return cls(tuple(int(part) for part in text.split(",")))
        except ValueError as exc:
            raise InvalidArgs(f"cannot parse degree list {text!r}") from exc


def _degrees(ks: Sequence[int] | DegreeList) -> tuple[int, ...]:
    if isinstance(ks, DegreeList):
        return ks.ks
    return DegreeList(tuple(int(k) for k in ks)).ks


def _log_bst(ks: tuple[int, ...]) -> float:
    total = sum(ks)
    return sum(k * math.log(k) for k in ks) - total * math.log(total)


def bst_constant(ks: Sequence[int] | DegreeList) -> float:
    """Universal constant prod k_i^{k_i} / k^k, valid in every complex Banach space."""
    return math.exp(_log_bst(_degrees(ks)))


def hilbert_constant(ks: Sequence[int] | DegreeList) -> float:
    """Optimal constant for complex Hilbert space: the square root of the universal one."""
    return math.exp(_log_bst(_degrees(ks)) / 2.0)


def p_constant(ks: Sequence[int] | DegreeList, p: float) -> float:
    """Optimal constant for lp, 1 <= p <= 2: the universal constant to the 1/p.

    Also defined (as a formula) for finite p > 2, where it is only the
    disjoint-variables equality value, not a proven bound.  p = inf is
    rejected: the 1/p -> 0 limit is a convention this package does not use.
    """
    p = float(p)
    if math.isinf(p):
        raise InvalidExponent("p_constant is not defined at p = inf")
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"exponent p={p} is not >= 1")
    return math.exp(_log_bst(_degrees(ks)) / p)


def dn_bound(n: int, p: float) -> float:
    """Upper bound n^|1/p - 1/2| on the worst Banach-Mazur distance of an
    n-dimensional subspace of an lp space to Hilbert space."""
    if n < 1:
        raise InvalidArgs(f"n must be >= 1, got {n}")
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"exponent p={p} is not >= 1")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return n ** abs(inv_p - 0.5)


def lemma1_bound(ks: Sequence[int] | DegreeList, dn: float) -> float:
    """Banach-Mazur route: hilbert constant deflated by dn^degree_total."""
    if dn < 1.0:
        raise InvalidArgs(f"distance bound must be >= 1, got {dn}")
    degs = _degrees(ks)
    return math.exp(_log_bst(degs) / 2.0 - sum(degs) * math.log(dn))


def sandwich_bounds(ks: Sequence[int] | DegreeList, p: float) -> tuple[float, float]:
    """Two-sided trap for the optimal constant when 2 <= p <= inf.

    high is the Hilbert constant; low deflates it by n^{total*(1/p - 1/2)}.
    The two arms collapse at p = 2.
    """
    p = float(p)
    if math.isnan(p) or p < 2.0:
        raise InvalidExponent(f"sandwich needs p >= 2, got {p}")
    degs = _degrees(ks)
    n, total = len(degs), sum(degs)
    high = math.exp(_log_bst(degs) / 2.0)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    low = n ** (total * (inv_p - 0.5)) * high
    return low, high


def guaranteed_lower_bound(ks: Sequence[int] | DegreeList, p: float) -> float:
    """The proven lower bound for the given exponent: the sharp lp constant
    for p <= 2, the sandwich low arm for p > 2."""
    if float(p) <= 2.0:
        return p_constant(ks, p)
    return sandwich_bounds(ks, p)[0]


@dataclass(frozen=True)
class ConstantsRecord:
    ks: tuple[int, ...]
    p: float
    bst: float
    hilbert: float
    lp: float
    dn_bound: float
    lemma1: float
    sandwich_low: float | None
    sandwich_high: float | None

    def to_json(self) -> dict:
        return {
            "ks": list(self.ks),
            "p": self.p,
            "bst": self.bst,
            "hilbert": self.hilbert,
            "lp": self.lp,
            "dn_bound": self.dn_bound,
            "lemma1": self.lemma1,
            "sandwich_low": self.sandwich_low,
            "sandwich_high": self.sandwich_high,
        }


def all_constants(ks: Sequence[int] | DegreeList, p: float) -> ConstantsRecord:
    degs = _degrees(ks)
    p = float(p)
    dn = dn_bound(len(degs), p)
    low, high = sandwich_bounds(degs, p) if p >= 2.0 else (None, None)
    return ConstantsRecord(
        ks=degs,
        p=p,
        bst=bst_constant(degs),
        hilbert=hilbert_constant(degs),
        lp=p_constant(degs, p),
        dn_bound=dn,
        lemma1=lemma1_bound(degs, dn),
        sandwich_low=low,
        sandwich_high=high,
    )
