"""Exact integer group-ring arithmetic.

``RingElement`` is a coefficient vector over a Cayley-table group; products
go through the convolution kernel backend. ``ExponentPoly`` is the sparse
polynomial view of an element of an abelian 2-group ring, which is what the
signature-set recursion manipulates (it needs generator substitutions like
A(x, y^2) that make no sense on a flat coefficient vector).
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .groups import AbelianGroup, ElemAbelianEmbedding, FiniteGroup, GroupMap


class RingElement:
    """Element of ZG for a Cayley-table group G."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: FiniteGroup, coeffs: np.ndarray | Sequence[int]):
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.shape != (group.order,):
            raise ValueError("coefficient vector length does not match group order")
        self.group = group
        self.coeffs = arr

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, group: FiniteGroup) -> "RingElement":
        return cls(group, np.zeros(group.order, dtype=np.int64))

    @classmethod
    def one(cls, group: FiniteGroup) -> "RingElement":
        return cls.scalar(group, 1)

    @classmethod
    def scalar(cls, group: FiniteGroup, c: int) -> "RingElement":
        coeffs = np.zeros(group.order, dtype=np.int64)
        coeffs[0] = c
        return cls(group, coeffs)

    @classmethod
    def basis(cls, group: FiniteGroup, g: int, c: int = 1) -> "RingElement":
        coeffs = np.zeros(group.order, dtype=np.int64)
        coeffs[g] = c
        return cls(group, coeffs)

    @classmethod
    def from_support(cls, group: FiniteGroup, support: Mapping[int, int]) -> "RingElement":
        coeffs = np.zeros(group.order, dtype=np.int64)
        for g, c in support.items():
            coeffs[int(g)] += int(c)
        return cls(group, coeffs)

    @classmethod
    def subgroup_sum(cls, group: FiniteGroup, elems: Iterable[int]) -> "RingElement":
        coeffs = np.zeros(group.order, dtype=np.int64)
        for g in elems:
            coeffs[int(g)] += 1
        return cls(group, coeffs)

    @classmethod
    def pm1_from_subset(cls, group: FiniteGroup, subset: Iterable[int]) -> "RingElement":
        """-1 on the subset, +1 elsewhere (the signed characteristic function)."""
        coeffs = np.ones(group.order, dtype=np.int64)
        for g in subset:
            coeffs[int(g)] = -1
        return cls(group, coeffs)

    # -- arithmetic -----------------------------------------------------------

    def _check_same_group(self, other: "RingElement") -> None:
        if self.group is not other.group:
            raise ValueError("ring elements live in different groups")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check_same_group(other)
        return RingElement(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other: "RingElement") -> "RingElement":
        self._check_same_group(other)
        return RingElement(self.group, self.coeffs - other.coeffs)

    def __neg__(self) -> "RingElement":
        return RingElement(self.group, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, RingElement):
            self._check_same_group(other)
            return RingElement(
                self.group, kernels.convolve(self.coeffs, other.coeffs, self.group.mul)
            )
        if isinstance(other, (int, np.integer)):
            return RingElement(self.group, self.coeffs * int(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return RingElement(self.group, self.coeffs * int(other))
        return NotImplemented

    def involution(self) -> "RingElement":
        """A^(-1): send each group element to its inverse."""
        return RingElement(self.group, self.coeffs[self.group.inv])

    def translate_left(self, g: int) -> "RingElement":
        """g * A."""
        out = np.zeros(self.group.order, dtype=np.int64)
        out[self.group.mul[g]] = self.coeffs
        return RingElement(self.group, out)

    def translate_right(self, g: int) -> "RingElement":
        """A * g."""
        out = np.zeros(self.group.order, dtype=np.int64)
        out[self.group.mul[:, g]] = self.coeffs
        return RingElement(self.group, out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingElement)
            and self.group is other.group
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((id(self.group), self.coeffs.tobytes()))

    # -- queries ---------------------------------------------------------------

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)

    def coeff_sum(self) -> int:
        return int(self.coeffs.sum())

    def is_ternary(self) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= 1))

    def is_pm1_on(self, s: Iterable[int]) -> bool:
        """True iff +-1 on s and 0 off s."""
        mask = np.zeros(self.group.order, dtype=bool)
        for g in s:
            mask[int(g)] = True
        return bool(
            np.all(np.abs(self.coeffs[mask]) == 1) and np.all(self.coeffs[~mask] == 0)
        )

    def to_pairs(self) -> list[tuple[int, int]]:
        return [(int(g), int(self.coeffs[g])) for g in self.support()]

    def __repr__(self) -> str:
        terms = []
        for g in self.support():
            c = int(self.coeffs[g])
            lbl = self.group.label(int(g))
            if c == 1:
                terms.append(f"+ {lbl}")
            elif c == -1:
                terms.append(f"- {lbl}")
            else:
                sign = "+" if c > 0 else "-"
                terms.append(f"{sign} {abs(c)}*{lbl}")
        if not terms:
            return "0"
        head = terms[0].lstrip("+ ").replace("- ", "-", 1) if terms else "0"
        return " ".join([head] + terms[1:])

    # -- transport along maps ----------------------------------------------------

    def pushforward(self, m: GroupMap) -> "RingElement":
        """Sum coefficients over fibers of the map (e.g. quotient projection)."""
        if m.source is not self.group:
            raise ValueError("map source does not match element group")
        out = kernels.pushforward(self.coeffs, m.images, m.target.order)
        return RingElement(m.target, out)

    def embed(self, m: GroupMap) -> "RingElement":
        """Transport along an injective map; collisions on the support are errors."""
        if m.source is not self.group:
            raise ValueError("map source does not match element group")
        sup = self.support()
        imgs = m.images[sup]
        if len(set(imgs.tolist())) != len(imgs):
            raise ValueError("embedding collides on the support")
        out = np.zeros(m.target.order, dtype=np.int64)
        out[imgs] = self.coeffs[sup]
        return RingElement(m.target, out)

    def apply_map(self, m: GroupMap) -> "RingElement":
        """Pushforward along an automorphism or other self-map of the group."""
        if m.source is not self.group or m.target is not self.group:
            raise ValueError("apply_map needs a self-map of the element's group")
        out = kernels.pushforward(self.coeffs, m.images, self.group.order)
        return RingElement(self.group, out)

    def conjugate_by(self, g: int) -> "RingElement":
        """g A g^-1."""
        grp = self.group
        out = np.zeros(grp.order, dtype=np.int64)
        ginv = grp.inv[g]
        out[grp.mul[grp.mul[g], ginv]] = self.coeffs
        return RingElement(grp, out)


def group_sum(group: FiniteGroup) -> RingElement:
    return RingElement(group, np.ones(group.order, dtype=np.int64))


def character_element(emb: ElemAbelianEmbedding, u: Sequence[int]) -> RingElement:
    """chi_u = prod_i (1 + (-1)^(u_i) x_i) as an element of Z[parent]."""
    if len(u) != emb.rank:
        raise ValueError("character index length does not match embedding rank")
    coeffs = np.zeros(emb.parent.order, dtype=np.int64)
    for h, bits in emb.exps.items():
        sign = sum(ui * ei for ui, ei in zip(u, bits)) % 2
        coeffs[h] = -1 if sign else 1
    return RingElement(emb.parent, coeffs)


# -- abelian polynomial view -----------------------------------------------------


class ExponentPoly:
    """Group-ring element of an abelian 2-group, keyed by exponent tuples."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: AbelianGroup, coeffs: Optional[Mapping[tuple, int]] = None):
        self.group = group
        canon: dict[tuple[int, ...], int] = {}
        if coeffs:
            for key, c in coeffs.items():
                if int(c) == 0:
                    continue
                k = group.reduce(key)
                canon[k] = canon.get(k, 0) + int(c)
                if canon[k] == 0:
                    del canon[k]
        self.coeffs = canon

    @classmethod
    def monomial(cls, group: AbelianGroup, exps: Sequence[int], c: int = 1) -> "ExponentPoly":
        return cls(group, {tuple(exps): c})

    @classmethod
    def one(cls, group: AbelianGroup) -> "ExponentPoly":
        return cls(group, {(0,) * group.rank: 1})

    def __add__(self, other: "ExponentPoly") -> "ExponentPoly":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return ExponentPoly(self.group, out)

    def __sub__(self, other: "ExponentPoly") -> "ExponentPoly":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) - c
        return ExponentPoly(self.group, out)

    def __neg__(self) -> "ExponentPoly":
        return ExponentPoly(self.group, {k: -c for k, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, ExponentPoly):
            out: dict[tuple[int, ...], int] = {}
            red = self.group.reduce
            for k1, c1 in self.coeffs.items():
                for k2, c2 in other.coeffs.items():
                    k = red(tuple(a + b for a, b in zip(k1, k2)))
                    out[k] = out.get(k, 0) + c1 * c2
            return ExponentPoly(self.group, out)
        if isinstance(other, (int, np.integer)):
            return ExponentPoly(self.group, {k: c * int(other) for k, c in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def involution(self) -> "ExponentPoly":
        return ExponentPoly(
            self.group, {tuple(-e for e in k): c for k, c in self.coeffs.items()}
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExponentPoly)
            and self.group.orders == other.group.orders
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.group.orders, tuple(sorted(self.coeffs.items()))))

    def substitute(self, exp_map: Sequence[Sequence[int]], target: AbelianGroup) -> "ExponentPoly":
        """Rewrite through a monomial substitution of the generators.

        exp_map[i] is the exponent vector (in the target group) of the image
        of source generator i. Exponents reduce modulo the target orders.
        """
        if len(exp_map) != self.group.rank:
            raise ValueError("need one exponent vector per source generator")
        images = [tuple(int(e) for e in v) for v in exp_map]
        for v in images:
            if len(v) != target.rank:
                raise ValueError("exponent vector length does not match target rank")
        out: dict[tuple[int, ...], int] = {}
        for key, c in self.coeffs.items():
            acc = [0] * target.rank
            for e, img in zip(key, images):
                for j, m in enumerate(img):
                    acc[j] += e * m
            k = target.reduce(acc)
            out[k] = out.get(k, 0) + c
        return ExponentPoly(target, out)

    def to_ring_element(self, m: GroupMap) -> RingElement:
        """Transport into a Cayley-table group along a generator-image map."""
        if not isinstance(m.source, AbelianGroup) or m.source.orders != self.group.orders:
            raise ValueError("map source does not match polynomial group")
        out = np.zeros(m.target.order, dtype=np.int64)
        seen: dict[int, tuple[int, ...]] = {}
        for key, c in self.coeffs.items():
            img = int(m.images[self.group.index_of(key)])
            if img in seen:
                raise ValueError(f"embedding collides: {seen[img]} and {key}")
            seen[img] = key
            out[img] += c
        return RingElement(m.target, out)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for key in sorted(self.coeffs):
            c = self.coeffs[key]
            mono = self.group.monomial_label(key)
            if c == 1:
                term = mono
            elif c == -1:
                term = f"-{mono}"
            elif mono == "1":
                term = str(c)
            else:
                term = f"{c}*{mono}"
            parts.append(term)
        text = " + ".join(parts)
        return text.replace("+ -", "- ")
