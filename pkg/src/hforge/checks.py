"""Verification predicates and the two classical nonexistence tests.

Everything here is exact integer arithmetic: difference-set verification via
the group-ring identity D D^(-1) = |G|, perfect-ternary-array and
signature-block checks, parameter arithmetic, and the Turyn/Dillon quotient
exclusions with the Kraemer exponent criterion for abelian groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .groups import (
    ElemAbelianEmbedding,
    FiniteGroup,
    find_normal_subgroups_up_to,
    is_cyclic,
    is_dihedral,
    quotient,
)
from .ring import RingElement, character_element


class VerificationError(RuntimeError):
    """A construction failed its mandatory verification."""


@dataclass(frozen=True)
class HadamardParams:
    """Parameters (v, k, lambda) = (4N^2, 2N^2 - N, N^2 - N) with N = +-2^d."""

    d: int
    n_value: int
    v: int
    k: int
    lam: int
    n: int

    def complement(self) -> "HadamardParams":
        return hadamard_params(self.d, sign=-1 if self.n_value > 0 else 1)

    def triple(self) -> tuple[int, int, int]:
        return (self.v, self.k, self.lam)


def hadamard_params(d: int, sign: int = 1) -> HadamardParams:
    if d < 0:
        raise ValueError("d must be nonnegative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n_value = sign * (1 << d)
    v = 4 * n_value * n_value
    k = 2 * n_value * n_value - n_value
    lam = n_value * n_value - n_value
    return HadamardParams(d=d, n_value=n_value, v=v, k=k, lam=lam, n=k - lam)


def d_for_order(order: int) -> int:
    """d with order = 2^(2d+2); raises if the order has the wrong form."""
    e = order.bit_length() - 1
    if order != 1 << e or e < 2 or e % 2:
        raise ValueError(f"order {order} is not of the form 2^(2d+2)")
    return (e - 2) // 2


def to_pm1_element(group: FiniteGroup, d) -> RingElement:
    """Boundary converter: subset (iterable of indices) or +-1 RingElement."""
    if isinstance(d, RingElement):
        if d.group is not group:
            raise ValueError("element belongs to a different group")
        return d
    return RingElement.pm1_from_subset(group, d)


def subset_indices(d: RingElement) -> list[int]:
    """The -1 positions of a +-1 element (the subset it encodes)."""
    return [int(g) for g in np.flatnonzero(d.coeffs == -1)]


@dataclass(frozen=True)
class DsVerdict:
    valid: bool
    params: Optional[tuple[int, int, int]]
    failure_reason: Optional[str]  # None | "not_pm1" | "autocorrelation"


def verify_hadamard(group: FiniteGroup, d) -> DsVerdict:
    """Machine-readable verdict for the verify-ds surface."""
    elt = to_pm1_element(group, d)
    if not bool(np.all(np.abs(elt.coeffs) == 1)):
        return DsVerdict(False, None, "not_pm1")
    prod = elt * elt.involution()
    if prod != RingElement.scalar(group, group.order):
        return DsVerdict(False, None, "autocorrelation")
    k = int(np.count_nonzero(elt.coeffs == -1))
    v = group.order
    n = v // 4
    return DsVerdict(True, (v, k, k - n), None)


def is_hadamard_ds(group: FiniteGroup, d) -> bool:
    return verify_hadamard(group, d).valid


def assert_hadamard(group: FiniteGroup, d, context: str = "") -> RingElement:
    elt = to_pm1_element(group, d)
    verdict = verify_hadamard(group, elt)
    if not verdict.valid:
        where = f" in {context}" if context else ""
        raise VerificationError(
            f"difference-set verification failed{where}: {verdict.failure_reason}"
        )
    return elt


def verify_hadamard_subset(group: FiniteGroup, subset: Iterable[int]) -> bool:
    """Independent {0,1}-form cross-check: D D^(-1) = n + lambda*G."""
    coeffs = np.zeros(group.order, dtype=np.int64)
    for g in subset:
        coeffs[int(g)] = 1
    d01 = RingElement(group, coeffs)
    k = int(coeffs.sum())
    v = group.order
    prod = (d01 * d01.involution()).coeffs
    lam_num = k * (k - 1)
    if v == 1 or lam_num % (v - 1):
        return False
    lam = lam_num // (v - 1)
    n = k - lam
    expected = np.full(v, lam, dtype=np.int64)
    expected[0] = n + lam
    return bool(np.array_equal(prod, expected)) and v == 4 * n


def complement_ds(d: RingElement) -> RingElement:
    return -d


def is_pta(t: RingElement, m: int) -> bool:
    """Perfect ternary array of modulus m: ternary values, T T^(-1) = m^2."""
    if not t.is_ternary():
        return False
    return (t * t.involution()) == RingElement.scalar(t.group, m * m)


@dataclass(frozen=True)
class TernaryArray:
    element: RingElement
    modulus: int

    def __post_init__(self):
        if not is_pta(self.element, self.modulus):
            raise VerificationError(
                f"not a perfect ternary array of modulus {self.modulus}"
            )


def _coset_transversal_support(
    group: FiniteGroup, k_elems: frozenset[int], emb: ElemAbelianEmbedding, a: RingElement
) -> bool:
    """a is +-1 on exactly one element of each coset of E in K, zero elsewhere."""
    support = a.support()
    if len(support) * len(emb) != len(k_elems):
        return False
    if not np.all(np.abs(a.coeffs[support]) == 1):
        return False
    seen: set[frozenset[int]] = set()
    for g in support:
        g = int(g)
        if g not in k_elems:
            return False
        coset = frozenset(group.op(g, e) for e in emb.elements)
        if coset in seen:
            return False
        seen.add(coset)
    return True


def is_signature_block(
    k_group: FiniteGroup,
    emb: ElemAbelianEmbedding,
    u: Sequence[int],
    a: RingElement,
    *,
    k_elems: Optional[Iterable[int]] = None,
) -> bool:
    """Signature block test: A is +-1 on a transversal of E in K and
    A chi_u A^(-1) = (|K| / 2^r) chi_u.

    With k_elems given, K is that subgroup of k_group and A lives in the
    ambient ring supported on K; otherwise K is k_group itself.
    """
    if emb.parent is not k_group or a.group is not k_group:
        raise ValueError("embedding, block, and group must share a carrier")
    if not emb.is_normal_in_parent() and k_elems is None:
        raise ValueError("E must be normal in K")
    elems = (
        frozenset(int(x) for x in k_elems)
        if k_elems is not None
        else frozenset(k_group.elements())
    )
    if not set(emb.elements) <= elems:
        raise ValueError("E is not contained in K")
    if not _coset_transversal_support(k_group, elems, emb, a):
        return False
    size = len(elems)
    factor = size >> emb.rank
    chi = character_element(emb, u)
    lhs = a * chi * a.involution()
    return lhs == factor * chi


def turyn_excluded(group: FiniteGroup) -> bool:
    """Nonexistence: some normal K with |K| < 2^d has cyclic quotient."""
    d = d_for_order(group.order)
    bound = (1 << d) // 2
    if bound < 1:
        return False
    for n in find_normal_subgroups_up_to(group, bound):
        q, _ = quotient(group, n)
        if is_cyclic(q):
            return True
    return False


def dillon_excluded(group: FiniteGroup) -> bool:
    """Nonexistence: some normal K with |K| < 2^d has dihedral quotient."""
    d = d_for_order(group.order)
    bound = (1 << d) // 2
    if bound < 1:
        return False
    for n in find_normal_subgroups_up_to(group, bound):
        q, _ = quotient(group, n)
        if is_dihedral(q):
            return True
    return False


def turyn_exponent_check(group: FiniteGroup) -> bool:
    """Kraemer criterion for abelian 2-groups: exponent at most 2^(d+2)."""
    if not group.is_abelian():
        raise ValueError("exponent criterion applies to abelian groups only")
    d = d_for_order(group.order)
    return group.exponent() <= 1 << (d + 2)


def minus_one_count_check(
    b_u: RingElement, u: Sequence[int], k, r: int
) -> bool:
    """Count of -1 values of B_u on K: |K|/2 for u != 0, |K|/2 +- sqrt(2^(r-2)|K|)
    for u = 0 (either sign accepted). K may be the carrier group or its order."""
    k_order = k.order if isinstance(k, FiniteGroup) else int(k)
    coeffs = b_u.coeffs[b_u.support()]
    if not np.all(np.abs(coeffs) == 1) or len(coeffs) != k_order:
        raise ValueError("B_u is not +-1-valued on K")
    count = int(np.count_nonzero(coeffs == -1))
    half = k_order // 2
    if any(u):
        return count == half
    dev = math.isqrt((1 << (r - 2)) * k_order) if r >= 2 else None
    if dev is None or dev * dev != (1 << (r - 2)) * k_order:
        raise ValueError("2^(r-2)|K| is not a perfect square")
    return count in (half - dev, half + dev)
