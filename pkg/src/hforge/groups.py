"""Finite 2-group engine: Cayley-table groups, builders, and structure queries.

Groups are immutable once constructed. Elements are indices 0..order-1 with
the identity fixed at index 0; multiplication is a full table lookup, which
keeps the group-ring convolution kernels branch-free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

FULL_ASSOC_LIMIT = 64  # exhaustive associativity check up to this order
ASSOC_SAMPLES = 1_000_000


class GroupAxiomError(ValueError):
    """A multiplication table violates the group axioms."""


class FiniteGroup:
    """Finite group given by a Cayley table with identity at index 0."""

    def __init__(
        self,
        mul: Sequence[Sequence[int]] | np.ndarray,
        *,
        name: str = "G",
        labels: Optional[Sequence[str]] = None,
        generators: Optional[Sequence[int]] = None,
        validate: bool = True,
        full_assoc_check: bool = False,
    ) -> None:
        table = np.asarray(mul, dtype=np.int32)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise GroupAxiomError("multiplication table must be square")
        self.order = int(table.shape[0])
        self.mul = np.ascontiguousarray(table)
        self.mul.setflags(write=False)
        self.name = name
        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.order:
            raise GroupAxiomError("labels length does not match group order")
        self._declared_generators = list(generators) if generators else None
        if validate:
            self._validate(full_assoc_check)
        self.inv = self._build_inverse_table()
        self.inv.setflags(write=False)
        self._element_orders: Optional[np.ndarray] = None
        self._center: Optional[tuple[int, ...]] = None
        self._generators: Optional[tuple[int, ...]] = None
        self._conj_classes: Optional[list[tuple[int, ...]]] = None

    # -- construction checks ------------------------------------------------

    def _validate(self, full_assoc: bool) -> None:
        n = self.order
        m = self.mul
        if m.min() < 0 or m.max() >= n:
            raise GroupAxiomError("table entry out of range")
        ident = np.arange(n, dtype=np.int32)
        if not np.array_equal(m[0], ident) or not np.array_equal(m[:, 0], ident):
            raise GroupAxiomError("index 0 is not a two-sided identity")
        for g in range(n):
            row = np.sort(m[g])
            col = np.sort(m[:, g])
            if not np.array_equal(row, ident) or not np.array_equal(col, ident):
                raise GroupAxiomError(f"table is not a Latin square at element {g}")
        if n <= FULL_ASSOC_LIMIT or full_assoc:
            left = m[m]            # left[a,b,c] = m[m[a,b], c]
            right = m[:, m]        # right[a,b,c] = m[a, m[b,c]]
            bad = np.argwhere(left != right)
            if len(bad):
                a, b, c = (int(v) for v in bad[0])
                raise GroupAxiomError(f"associativity fails at triple ({a},{b},{c})")
        else:
            rng = np.random.default_rng(0)
            a = rng.integers(0, n, ASSOC_SAMPLES)
            b = rng.integers(0, n, ASSOC_SAMPLES)
            c = rng.integers(0, n, ASSOC_SAMPLES)
            if not np.array_equal(m[m[a, b], c], m[a, m[b, c]]):
                raise GroupAxiomError("associativity fails on sampled triples")

    def _build_inverse_table(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int32)
        rows, cols = np.nonzero(self.mul == 0)
        inv[rows] = cols
        if np.any(self.mul[inv, np.arange(self.order)] != 0):
            raise GroupAxiomError("inverse table inconsistent")
        return inv

    # -- basic arithmetic ----------------------------------------------------

    def op(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def conjugate(self, g: int, h: int) -> int:
        """g h g^{-1}."""
        return int(self.mul[self.mul[g, h], self.inv[g]])

    def power(self, g: int, k: int) -> int:
        if k < 0:
            return self.power(self.inverse(g), -k)
        acc = 0
        base = g
        while k:
            if k & 1:
                acc = self.op(acc, base)
            base = self.op(base, base)
            k >>= 1
        return acc

    def label(self, g: int) -> str:
        if self.labels is not None:
            return self.labels[g]
        return str(g)

    def elements(self) -> range:
        return range(self.order)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    # -- structure queries ---------------------------------------------------

    def element_orders(self) -> np.ndarray:
        if self._element_orders is None:
            orders = np.ones(self.order, dtype=np.int64)
            for g in range(1, self.order):
                k, acc = 1, g
                while acc != 0:
                    acc = self.op(acc, g)
                    k += 1
                orders[g] = k
            orders.setflags(write=False)
            self._element_orders = orders
        return self._element_orders

    def element_order(self, g: int) -> int:
        return int(self.element_orders()[g])

    def exponent(self) -> int:
        exp = 1
        for o in self.element_orders():
            exp = exp * int(o) // np.gcd(exp, int(o))
        return int(exp)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def center(self) -> tuple[int, ...]:
        if self._center is None:
            mask = np.all(self.mul == self.mul.T, axis=1)
            self._center = tuple(int(g) for g in np.flatnonzero(mask))
        return self._center

    def involutions(self) -> list[int]:
        return [g for g in range(1, self.order) if self.element_order(g) == 2]

    def central_involutions(self) -> list[int]:
        z = set(self.center())
        return [g for g in self.involutions() if g in z]

    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        if self._conj_classes is None:
            seen = np.zeros(self.order, dtype=bool)
            classes = []
            for g in range(self.order):
                if seen[g]:
                    continue
                cls = {self.conjugate(h, g) for h in range(self.order)}
                for x in cls:
                    seen[x] = True
                classes.append(tuple(sorted(cls)))
            self._conj_classes = classes
        return self._conj_classes

    def generators(self) -> tuple[int, ...]:
        """A generating set: declared one if given, else greedy by index."""
        if self._generators is None:
            if self._declared_generators:
                gens = tuple(self._declared_generators)
                if len(subgroup_generated(self, gens)) != self.order:
                    raise GroupAxiomError("declared generators do not generate")
                self._generators = gens
            else:
                gens: list[int] = []
                span = {0}
                for g in range(1, self.order):
                    if g not in span:
                        gens.append(g)
                        span = subgroup_generated(self, gens)
                        if len(span) == self.order:
                            break
                self._generators = tuple(gens)
        return self._generators


# -- builders -----------------------------------------------------------------


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    idx = np.arange(n)
    mul = (idx[:, None] + idx[None, :]) % n
    labels = ["1"] + [f"x^{k}" if k > 1 else "x" for k in range(1, n)]
    gens = [1] if n > 1 else []
    return FiniteGroup(mul, name=f"C{n}", labels=labels[:n], generators=gens)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    n1, n2 = g1.order, g2.order
    a1, b1 = np.divmod(np.arange(n1 * n2)[:, None], n2)
    a2, b2 = np.divmod(np.arange(n1 * n2)[None, :], n2)
    mul = g1.mul[a1, a2] * n2 + g2.mul[b1, b2]
    labels = [f"({g1.label(a)},{g2.label(b)})" for a in range(n1) for b in range(n2)]
    gens = [g * n2 for g in g1.generators()] + list(g2.generators())
    return FiniteGroup(
        mul, name=f"{g1.name}x{g2.name}", labels=labels, generators=gens
    )


def semidirect_cyclic(m: int, n: int, k: int) -> FiniteGroup:
    """C_m x| C_n: <x, y : x^m = y^n = 1, y x y^-1 = x^k>, element x^i y^j -> i*n + j."""
    if pow(k, n, m) != 1 % m:
        raise ValueError(f"k={k} does not define an order-{n} action: k^n != 1 mod m")
    # y^j x y^-j = x^(k^j)
    kpow = [pow(k, j, m) for j in range(n)]
    mul = np.empty((m * n, m * n), dtype=np.int32)
    for i1 in range(m):
        for j1 in range(n):
            row = i1 * n + j1
            for i2 in range(m):
                for j2 in range(n):
                    i = (i1 + i2 * kpow[j1]) % m
                    j = (j1 + j2) % n
                    mul[row, i2 * n + j2] = i * n + j
    labels = []
    for i in range(m):
        xs = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        for j in range(n):
            ys = "" if j == 0 else ("y" if j == 1 else f"y^{j}")
            word = "*".join(p for p in (xs, ys) if p)
            labels.append(word or "1")
    return FiniteGroup(
        mul,
        name=f"C{m}:{k}:C{n}",
        labels=labels,
        generators=[n, 1] if m > 1 and n > 1 else None,
    )


def semidirect_product(
    n_grp: FiniteGroup, h_grp: FiniteGroup, action: Sequence[Sequence[int]]
) -> FiniteGroup:
    """N x| H with an explicit action: action[h] is the automorphism of N for h."""
    act = np.asarray(action, dtype=np.int32)
    if act.shape != (h_grp.order, n_grp.order):
        raise ValueError("action must give one permutation of N per element of H")
    for h in range(h_grp.order):
        perm = act[h]
        if not np.array_equal(np.sort(perm), np.arange(n_grp.order)):
            raise ValueError(f"action[{h}] is not a permutation")
        if not np.array_equal(perm[n_grp.mul], n_grp.mul[perm[:, None], perm[None, :]]):
            raise ValueError(f"action[{h}] is not an automorphism of N")
    for h1 in range(h_grp.order):
        for h2 in range(h_grp.order):
            if not np.array_equal(
                act[h_grp.op(h1, h2)], act[h1][act[h2]]
            ):
                raise ValueError("action is not a homomorphism")
    nn, nh = n_grp.order, h_grp.order
    mul = np.empty((nn * nh, nn * nh), dtype=np.int32)
    for a in range(nn):
        for h1 in range(nh):
            row = a * nh + h1
            for b in range(nn):
                for h2 in range(nh):
                    mul[row, b * nh + h2] = (
                        n_grp.op(a, int(act[h1][b])) * nh + h_grp.op(h1, h2)
                    )
    labels = [
        f"({n_grp.label(a)},{h_grp.label(h)})" for a in range(nn) for h in range(nh)
    ]
    return FiniteGroup(mul, name=f"{n_grp.name}:{h_grp.name}", labels=labels)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order n (n = 2m, m >= 2)."""
    if n % 2 or n < 4:
        raise ValueError("dihedral order must be even and at least 4")
    g = semidirect_cyclic(n // 2, 2, n // 2 - 1)
    g.name = f"D{n}"
    return g


def generalized_quaternion(n: int) -> FiniteGroup:
    """Q_n of order n = 2^a >= 8: <x,y : x^(n/2)=1, y^2 = x^(n/4), yxy^-1 = x^-1>."""
    if n < 8 or n & (n - 1):
        raise ValueError("generalized quaternion order must be a power of 2, >= 8")
    m = n // 2
    mul = np.empty((n, n), dtype=np.int32)
    # element x^i y^j, 0 <= i < m, j in {0,1}, index i*2 + j
    for i1 in range(m):
        for j1 in range(2):
            row = i1 * 2 + j1
            for i2 in range(m):
                for j2 in range(2):
                    i = (i1 + (i2 if j1 == 0 else -i2)) % m
                    j = j1 + j2
                    if j == 2:
                        i = (i + m // 2) % m  # y^2 = x^(m/2)
                        j = 0
                    mul[row, i2 * 2 + j2] = i * 2 + j
    labels = []
    for i in range(m):
        xs = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        for j in range(2):
            word = "*".join(p for p in (xs, "y" if j else "") if p)
            labels.append(word or "1")
    return FiniteGroup(mul, name=f"Q{n}", labels=labels, generators=[2, 1])


def quaternion8() -> FiniteGroup:
    return generalized_quaternion(8)


def semidihedral(n: int) -> FiniteGroup:
    """Semidihedral group of order n = 2^a >= 16."""
    if n < 16 or n & (n - 1):
        raise ValueError("semidihedral order must be a power of 2, >= 16")
    g = semidirect_cyclic(n // 2, 2, n // 4 - 1)
    g.name = f"SD{n}"
    return g


def modular(n: int) -> FiniteGroup:
    """Modular 2-group of order n = 2^a >= 16: action x -> x^(n/4 + 1)."""
    if n < 16 or n & (n - 1):
        raise ValueError("modular group order must be a power of 2, >= 16")
    g = semidirect_cyclic(n // 2, 2, n // 4 + 1)
    g.name = f"M{n}"
    return g


# -- abelian groups as exponent tuples ----------------------------------------

_GEN_NAMES = ("x", "y", "z")


def _gen_name(i: int) -> str:
    return _GEN_NAMES[i] if i < len(_GEN_NAMES) else f"x{i + 1}"


@dataclass(frozen=True)
class AbelianGroup:
    """Abelian 2-group C_{n1} x ... x C_{nr}, elements are exponent tuples."""

    orders: tuple[int, ...]

    def __init__(self, orders: Iterable[int]) -> None:
        object.__setattr__(self, "orders", tuple(int(o) for o in orders))
        for o in self.orders:
            if o < 1 or o & (o - 1):
                raise ValueError(f"factor order {o} is not a power of 2")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        n = 1
        for o in self.orders:
            n *= o
        return n

    def index_of(self, exps: Sequence[int]) -> int:
        idx = 0
        for e, o in zip(exps, self.orders):
            idx = idx * o + (e % o)
        return idx

    def exps_of(self, idx: int) -> tuple[int, ...]:
        out = []
        for o in reversed(self.orders):
            idx, e = divmod(idx, o)
            out.append(e)
        return tuple(reversed(out))

    def reduce(self, exps: Sequence[int]) -> tuple[int, ...]:
        return tuple(e % o for e, o in zip(exps, self.orders))

    def monomial_label(self, exps: Sequence[int]) -> str:
        parts = []
        for i, e in enumerate(exps):
            if e == 1:
                parts.append(_gen_name(i))
            elif e > 1:
                parts.append(f"{_gen_name(i)}^{e}")
        return "*".join(parts) or "1"

    def torsion_basis_exps(self) -> list[tuple[int, ...]]:
        """Exponent tuples of x_i^(n_i/2): basis of the unique maximal C_2^r."""
        basis = []
        for i, o in enumerate(self.orders):
            if o < 2:
                raise ValueError("torsion basis needs every factor order >= 2")
            e = [0] * self.rank
            e[i] = o // 2
            basis.append(tuple(e))
        return basis

    def to_group(self) -> FiniteGroup:
        n = self.order
        mul = np.empty((n, n), dtype=np.int32)
        all_exps = [self.exps_of(i) for i in range(n)]
        for a in range(n):
            ea = all_exps[a]
            for b in range(n):
                eb = all_exps[b]
                mul[a, b] = self.index_of([u + v for u, v in zip(ea, eb)])
        labels = [self.monomial_label(e) for e in all_exps]
        gens = [self.index_of([1 if j == i else 0 for j in range(self.rank)])
                for i in range(self.rank) if self.orders[i] > 1]
        name = "x".join(f"C{o}" for o in self.orders) or "C1"
        return FiniteGroup(mul, name=name, labels=labels, generators=gens)


def elementary_abelian(r: int) -> FiniteGroup:
    return AbelianGroup([2] * r).to_group()


# -- maps between groups -------------------------------------------------------


class GroupMap:
    """Multiplicative map into a Cayley-table group.

    The source is either a FiniteGroup (images stored per element) or an
    AbelianGroup (images stored per generator and expanded on demand).
    """

    def __init__(
        self,
        source: FiniteGroup | AbelianGroup,
        target: FiniteGroup,
        images: Sequence[int],
        *,
        validate: bool = True,
    ) -> None:
        self.source = source
        self.target = target
        if isinstance(source, AbelianGroup):
            if len(images) != source.rank:
                raise ValueError("need one image per abelian generator")
            self.generator_images = [int(g) for g in images]
            self.images = self._expand_abelian()
        else:
            if len(images) != source.order:
                raise ValueError("need one image per source element")
            self.generator_images = None
            self.images = np.asarray(images, dtype=np.int32)
        self.images.setflags(write=False)
        if validate:
            self.validate()

    def _expand_abelian(self) -> np.ndarray:
        src: AbelianGroup = self.source
        img = np.empty(src.order, dtype=np.int32)
        for idx in range(src.order):
            exps = src.exps_of(idx)
            acc = 0
            for g, e in zip(self.generator_images, exps):
                acc = self.target.op(acc, self.target.power(g, e))
            img[idx] = acc
        return img

    def validate(self) -> None:
        if isinstance(self.source, AbelianGroup):
            src = self.source
            for i, (g, o) in enumerate(zip(self.generator_images, src.orders)):
                if self.target.power(g, o) != 0:
                    raise ValueError(f"generator image {i} has order not dividing {o}")
            for g, h in itertools.combinations(self.generator_images, 2):
                if self.target.op(g, h) != self.target.op(h, g):
                    raise ValueError("abelian generator images do not commute")
        else:
            src = self.source
            m = self.images
            if int(m[0]) != 0:
                raise ValueError("map does not send identity to identity")
            tgt_mul = self.target.mul
            if not np.array_equal(m[src.mul], tgt_mul[m[:, None], m[None, :]]):
                raise ValueError("map is not multiplicative")

    def source_order(self) -> int:
        return self.source.order

    def apply(self, g: int) -> int:
        return int(self.images[g])

    def is_injective(self) -> bool:
        return len(set(self.images.tolist())) == len(self.images)

    def image_set(self) -> frozenset[int]:
        return frozenset(int(g) for g in self.images)


def identity_map(g: FiniteGroup) -> GroupMap:
    return GroupMap(g, g, np.arange(g.order), validate=False)


# -- subgroup machinery ---------------------------------------------------------


def subgroup_generated(g: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
    span = {0}
    frontier = [0]
    gens = [int(x) for x in gens]
    while frontier:
        nxt = []
        for h in frontier:
            for s in gens:
                p = g.op(h, s)
                if p not in span:
                    span.add(p)
                    nxt.append(p)
        frontier = nxt
    return frozenset(span)


def is_subgroup(g: FiniteGroup, s: Iterable[int]) -> bool:
    elems = set(int(x) for x in s)
    if 0 not in elems:
        return False
    return all(g.op(a, b) in elems for a in elems for b in elems)


def _require_subgroup(g: FiniteGroup, s: Iterable[int]) -> frozenset[int]:
    elems = frozenset(int(x) for x in s)
    if not is_subgroup(g, elems):
        raise ValueError("element set is not closed under multiplication")
    return elems


def is_normal(g: FiniteGroup, s: Iterable[int]) -> bool:
    elems = _require_subgroup(g, s)
    return all(
        g.conjugate(t, h) in elems for t in g.generators() for h in elems
    )


def is_cyclic(g: FiniteGroup, s: Optional[Iterable[int]] = None) -> bool:
    elems = _require_subgroup(g, s) if s is not None else frozenset(g.elements())
    return any(g.element_order(h) == len(elems) for h in elems)


def is_dihedral(g: FiniteGroup, s: Optional[Iterable[int]] = None) -> bool:
    """Dihedral of order 2m, m >= 2: cyclic index-2 subgroup inverted by an
    outside involution."""
    elems = _require_subgroup(g, s) if s is not None else frozenset(g.elements())
    n = len(elems)
    if n < 4 or n % 2:
        return False
    m = n // 2
    seen_cyclic: set[frozenset[int]] = set()
    for c in elems:
        if g.element_order(c) != m:
            continue
        cyc = subgroup_generated(g, [c])
        if cyc in seen_cyclic or not cyc <= elems:
            continue
        seen_cyclic.add(cyc)
        cinv = g.inverse(c)
        for t in elems:
            if t in cyc or g.element_order(t) != 2:
                continue
            if g.conjugate(t, c) == cinv:
                return True
    return False


def is_elementary_abelian(g: FiniteGroup, s: Iterable[int], r: Optional[int] = None) -> bool:
    elems = _require_subgroup(g, s)
    if len(elems) != 1 << (len(elems).bit_length() - 1):
        return False
    if r is not None and len(elems) != 1 << r:
        return False
    return all(g.element_order(h) <= 2 for h in elems) and all(
        g.op(a, b) == g.op(b, a) for a in elems for b in elems
    )


def abelian_invariants(g: FiniteGroup, s: Iterable[int]) -> list[int]:
    """Invariant factors [n1 >= n2 >= ...] of an abelian subgroup (2-group)."""
    elems = sorted(_require_subgroup(g, s))
    for a in elems:
        for b in elems:
            if g.op(a, b) != g.op(b, a):
                raise ValueError("subgroup is not abelian")
    n = len(elems)
    if n == 1:
        return []
    if n & (n - 1):
        raise ValueError("not a 2-group subgroup")
    orders = [g.element_order(h) for h in elems]
    # count[k] = #elements killed by squaring k times; differences give the
    # conjugate partition of the exponent multiset.
    kmax = max(o.bit_length() - 1 for o in orders)
    counts = [sum(1 for o in orders if o <= (1 << k)) for k in range(kmax + 1)]
    logs = [c.bit_length() - 1 for c in counts]
    exps_ge = [logs[k] - logs[k - 1] for k in range(1, kmax + 1)]
    result: list[int] = []
    for k in range(kmax, 0, -1):
        copies = exps_ge[k - 1] - (exps_ge[k] if k < kmax else 0)
        result.extend([1 << k] * copies)
    return result


def subgroup_as_group(
    g: FiniteGroup, s: Iterable[int], *, name: Optional[str] = None
) -> tuple[FiniteGroup, GroupMap]:
    """Extract a subgroup as a standalone group plus its inclusion map."""
    elems = sorted(_require_subgroup(g, s))
    if elems[0] != 0:
        raise ValueError("subgroup must contain the identity")
    pos = {h: i for i, h in enumerate(elems)}
    k = len(elems)
    mul = np.empty((k, k), dtype=np.int32)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            mul[i, j] = pos[g.op(a, b)]
    labels = [g.label(h) for h in elems]
    sub = FiniteGroup(mul, name=name or f"{g.name}|{k}", labels=labels)
    incl = GroupMap(sub, g, np.asarray(elems, dtype=np.int32), validate=False)
    return sub, incl


def quotient(g: FiniteGroup, n_elems: Iterable[int]) -> tuple[FiniteGroup, GroupMap]:
    """Quotient by a normal subgroup, with the natural projection map.

    Coset representatives are the minimal element of each coset; the identity
    coset gets quotient index 0.
    """
    nset = frozenset(int(x) for x in n_elems)
    if not is_normal(g, nset):
        raise ValueError("subgroup is not normal")
    coset_of = np.full(g.order, -1, dtype=np.int64)
    reps: list[int] = []
    for h in range(g.order):
        if coset_of[h] >= 0:
            continue
        cid = len(reps)
        reps.append(h)
        for x in nset:
            coset_of[g.op(h, x)] = cid
    q = len(reps)
    mul = np.empty((q, q), dtype=np.int32)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            mul[i, j] = coset_of[g.op(a, b)]
    labels = [f"[{g.label(r)}]" for r in reps]
    qgrp = FiniteGroup(mul, name=f"{g.name}/N{len(nset)}", labels=labels)
    proj = GroupMap(g, qgrp, coset_of.astype(np.int32), validate=False)
    return qgrp, proj


def find_normal_subgroups_up_to(g: FiniteGroup, max_order: int) -> list[frozenset[int]]:
    """All normal subgroups of order <= max_order (max_order <= 8).

    Every nontrivial normal subgroup of a 2-group meets the center, so we
    recurse: pull back normal subgroups of G/<t> over central involutions t.
    """
    if max_order > 8:
        raise ValueError("normal subgroup enumeration capped at order 8")
    found: set[frozenset[int]] = {frozenset({0})}
    if max_order >= 2:
        for t in g.central_involutions():
            n = frozenset({0, t})
            found.add(n)
            if max_order >= 4:
                qgrp, proj = quotient(g, n)
                for sub in find_normal_subgroups_up_to(qgrp, max_order // 2):
                    if len(sub) < 2:
                        continue
                    pulled = frozenset(
                        h for h in range(g.order) if int(proj.images[h]) in sub
                    )
                    found.add(pulled)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def find_normal_abelian_subgroup(
    g: FiniteGroup, invariants: Sequence[int]
) -> Optional[tuple[frozenset[int], GroupMap]]:
    """First normal abelian subgroup with the given invariant factors, if any.

    Enumerates generator tuples by increasing element index: elements of the
    exact required orders, pairwise commuting, with the generated set of full
    product size (which pins the invariant factors exactly).
    """
    invs = [int(o) for o in invariants]
    if any(o < 2 or o & (o - 1) for o in invs):
        raise ValueError("invariants must be powers of 2, each >= 2")
    target_size = 1
    for o in invs:
        target_size *= o
    if g.order % target_size:
        return None
    orders = g.element_orders()
    candidates = [
        [int(h) for h in range(1, g.order) if orders[h] == o] for o in invs
    ]
    seen: set[frozenset[int]] = set()
    gens_of_g = g.generators()

    def extend(chosen: list[int], depth: int) -> Optional[tuple[frozenset[int], GroupMap]]:
        if depth == len(invs):
            span = subgroup_generated(g, chosen)
            if len(span) != target_size or span in seen:
                if len(span) == target_size:
                    seen.add(span)
                return None
            seen.add(span)
            if all(g.conjugate(t, h) in span for t in gens_of_g for h in chosen):
                emb = GroupMap(AbelianGroup(invs), g, chosen)
                return span, emb
            return None
        prev = chosen[-1] if chosen else 0
        for h in candidates[depth]:
            # for equal orders insist on increasing indices to halve the work
            if depth and invs[depth] == invs[depth - 1] and h <= prev:
                continue
            if any(g.op(c, h) != g.op(h, c) for c in chosen):
                continue
            out = extend(chosen + [h], depth + 1)
            if out is not None:
                return out
        return None

    return extend([], 0)


def index2_subgroups(g: FiniteGroup) -> list[frozenset[int]]:
    """All subgroups of index 2 (kernels of surjections onto C_2)."""
    # Frattini-style subgroup: generated by all squares and commutators.
    frat_gens = {g.op(h, h) for h in range(g.order)}
    gens = g.generators()
    for a in gens:
        for b in gens:
            frat_gens.add(g.op(g.op(a, b), g.inverse(g.op(b, a))))
    phi = subgroup_generated(g, frat_gens)
    qgrp, proj = quotient(g, phi)
    # coordinates of the elementary abelian quotient
    basis: list[int] = []
    span = {0: ()}
    for h in range(1, qgrp.order):
        if h in span:
            continue
        new_span = {}
        for elem, bits in span.items():
            new_span[elem] = bits + (0,)
            new_span[qgrp.op(elem, h)] = bits + (1,)
        basis.append(h)
        span = new_span
        if len(span) == qgrp.order:
            break
    k = len(basis)
    coords = {}
    for elem, bits in span.items():
        coords[elem] = sum(b << (k - 1 - i) for i, b in enumerate(bits))
    out = []
    for phi_vec in range(1, 1 << k):
        sub = frozenset(
            h for h in range(g.order)
            if bin(coords[int(proj.images[h])] & phi_vec).count("1") % 2 == 0
        )
        out.append(sub)
    return sorted(out, key=lambda s: sorted(s))


# -- elementary abelian embeddings ----------------------------------------------


@dataclass
class ElemAbelianEmbedding:
    """Rank-r elementary abelian subgroup E <= G given by commuting involutions."""

    parent: FiniteGroup
    basis: tuple[int, ...]
    elements: tuple[int, ...] = field(init=False)
    rank: int = field(init=False)
    exps: dict[int, tuple[int, ...]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        g = self.parent
        self.basis = tuple(int(b) for b in self.basis)
        r = len(self.basis)
        for b in self.basis:
            if g.element_order(b) != 2:
                raise ValueError(f"basis element {b} is not an involution")
        for a, b in itertools.combinations(self.basis, 2):
            if g.op(a, b) != g.op(b, a):
                raise ValueError("basis elements do not commute")
        exps: dict[int, tuple[int, ...]] = {}
        for bits in itertools.product((0, 1), repeat=r):
            acc = 0
            for b, e in zip(self.basis, bits):
                if e:
                    acc = g.op(acc, b)
            if acc in exps:
                raise ValueError("basis is not independent")
            exps[acc] = bits
        self.exps = exps
        self.elements = tuple(sorted(exps))
        self.rank = r

    def __len__(self) -> int:
        return 1 << self.rank

    def contains(self, h: int) -> bool:
        return h in self.exps

    def character_value(self, u: Sequence[int], h: int) -> int:
        """chi_u(h) = (-1)^(u . exps(h)) for h in E."""
        e = self.exps[h]
        return -1 if sum(ui * ei for ui, ei in zip(u, e)) % 2 else 1

    def is_normal_in_parent(self) -> bool:
        g = self.parent
        return all(
            g.conjugate(t, h) in self.exps
            for t in g.generators()
            for h in self.elements
        )

    def conj_character_index(self, g_elt: int, u: Sequence[int]) -> tuple[int, ...]:
        """Index w with g chi_u g^-1 = chi_w. Requires E normal."""
        g = self.parent
        ginv = g.inverse(g_elt)
        w = []
        for b in self.basis:
            h = g.conjugate(ginv, b)
            if h not in self.exps:
                raise ValueError("conjugation does not preserve E")
            w.append(0 if self.character_value(u, h) == 1 else 1)
        return tuple(w)
