"""Signature-set constructors.

A signature set on K with respect to a normal E = C_2^r is an indexed
multiset {A_u} of +-1 functions on transversals of E satisfying
A_u chi_u A_u^(-1) = (|K|/2^r) chi_u. Constructors here never return an
unverified set: every block is re-checked before the object is handed out.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Optional, Sequence

import numpy as np

from .checks import VerificationError, is_pta, is_signature_block
from .groups import (
    AbelianGroup,
    ElemAbelianEmbedding,
    FiniteGroup,
    GroupMap,
    cyclic,
    direct_product,
    quaternion8,
)
from .ring import ExponentPoly, RingElement, character_element

BitIndex = tuple[int, ...]


def _all_indices(r: int) -> list[BitIndex]:
    return list(itertools.product((0, 1), repeat=r))


class SignatureSet:
    """Verified signature set on a carrier group with respect to E <= carrier."""

    def __init__(
        self,
        group: FiniteGroup,
        embedding: ElemAbelianEmbedding,
        blocks: dict[BitIndex, RingElement],
        *,
        polys: Optional[dict[BitIndex, ExponentPoly]] = None,
        abelian: Optional[AbelianGroup] = None,
        factors: Optional[list[RingElement]] = None,
        verify: bool = True,
    ) -> None:
        r = embedding.rank
        if set(blocks) != set(_all_indices(r)):
            raise ValueError("blocks must be indexed by all of {0,1}^r")
        self.group = group
        self.embedding = embedding
        self.blocks = dict(blocks)
        self.polys = dict(polys) if polys is not None else None
        self.abelian = abelian
        self.factors = factors
        if verify:
            self.verify()

    @property
    def rank(self) -> int:
        return self.embedding.rank

    def verify(self) -> None:
        for u, a in self.blocks.items():
            if not is_signature_block(self.group, self.embedding, u, a):
                raise VerificationError(
                    f"block {''.join(map(str, u))} fails the signature identity"
                )

    def b_blocks(self) -> dict[BitIndex, RingElement]:
        """B_u = A_u chi_u, the +-1 functions on all of the carrier."""
        out = {}
        for u, a in self.blocks.items():
            out[u] = a * character_element(self.embedding, u)
        return out

    # -- persistence -----------------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.abelian is not None:
            carrier = {"type": "abelian", "orders": list(self.abelian.orders)}
        else:
            carrier = {"type": "table", "name": self.group.name}
        return {
            "format": 1,
            "carrier": carrier,
            "basis": [int(b) for b in self.embedding.basis],
            "blocks": {
                "".join(map(str, u)): [[int(g), int(c)] for g, c in a.to_pairs()]
                for u, a in sorted(self.blocks.items())
            },
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, data: dict, group: Optional[FiniteGroup] = None) -> "SignatureSet":
        carrier = data["carrier"]
        abelian = None
        if carrier["type"] == "abelian":
            abelian = AbelianGroup(carrier["orders"])
            group = abelian.to_group()
        elif group is None:
            raise ValueError("table-carrier signature set needs an explicit group")
        emb = ElemAbelianEmbedding(group, tuple(data["basis"]))
        blocks = {}
        for key, pairs in data["blocks"].items():
            u = tuple(int(ch) for ch in key)
            blocks[u] = RingElement.from_support(group, {g: c for g, c in pairs})
        return cls(group, emb, blocks, abelian=abelian)

    @classmethod
    def load(cls, path, group: Optional[FiniteGroup] = None) -> "SignatureSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh), group=group)


def _realize_abelian(
    ab: AbelianGroup, polys: dict[BitIndex, ExponentPoly]
) -> SignatureSet:
    grp = ab.to_group()
    emb_map = GroupMap(
        ab,
        grp,
        [ab.index_of([1 if j == i else 0 for j in range(ab.rank)]) for i in range(ab.rank)],
        validate=False,
    )
    basis = tuple(ab.index_of(e) for e in ab.torsion_basis_exps())
    emb = ElemAbelianEmbedding(grp, basis)
    blocks = {u: p.to_ring_element(emb_map) for u, p in polys.items()}
    return SignatureSet(grp, emb, blocks, polys=polys, abelian=ab)


# -- trivial and product sets -----------------------------------------------------


def trivial_signature_set(r: int) -> SignatureSet:
    """All blocks equal to 1 on C_2^r with respect to itself."""
    if r < 1:
        raise ValueError("rank must be at least 1")
    ab = AbelianGroup([2] * r)
    one = ExponentPoly.one(ab)
    return _realize_abelian(ab, {u: one for u in _all_indices(r)})


def signature_product(s1: SignatureSet, s2: SignatureSet) -> SignatureSet:
    """Blocks A_u alpha_v on the direct product, indexed by concatenated bits
    (s1 bits first)."""
    grp = direct_product(s1.group, s2.group)
    n2 = s2.group.order
    basis = tuple(int(b) * n2 for b in s1.embedding.basis) + tuple(
        int(b) for b in s2.embedding.basis
    )
    emb = ElemAbelianEmbedding(grp, basis)
    blocks = {}
    for u, a in s1.blocks.items():
        for v, b in s2.blocks.items():
            coeffs = np.outer(a.coeffs, b.coeffs).ravel()
            blocks[u + v] = RingElement(grp, coeffs)
    polys = None
    abelian = None
    if s1.abelian is not None and s2.abelian is not None and s1.polys and s2.polys:
        abelian = AbelianGroup(s1.abelian.orders + s2.abelian.orders)
        polys = {}
        for u, p in s1.polys.items():
            for v, q in s2.polys.items():
                merged = {
                    k1 + k2: c1 * c2
                    for k1, c1 in p.coeffs.items()
                    for k2, c2 in q.coeffs.items()
                }
                polys[u + v] = ExponentPoly(abelian, merged)
    return SignatureSet(grp, emb, blocks, polys=polys, abelian=abelian)


# -- the abelian recursion ---------------------------------------------------------


def valid_abelian_tuples(d: int) -> list[tuple[int, ...]]:
    """All exponent tuples (a_1 >= ... >= a_r) admissible for a given d."""
    out = []
    for r in range(2, d + 2):
        total = 2 * d - r + 2
        cap = d - r + 2

        def parts(remaining: int, slots: int, high: int, prefix: tuple[int, ...]):
            if slots == 0:
                if remaining == 0:
                    out.append(prefix)
                return
            for a in range(min(high, remaining - (slots - 1)), 0, -1):
                parts(remaining - a, slots - 1, a, prefix + (a,))

        parts(total, r, cap, ())
    return out


def _unit(r: int, i: int, scale: int = 1) -> tuple[int, ...]:
    return tuple(scale if j == i else 0 for j in range(r))


def _insert_zero_coordinate(
    poly: ExponentPoly, pos: int, target: AbelianGroup
) -> ExponentPoly:
    out = {}
    for key, c in poly.coeffs.items():
        out[key[:pos] + (0,) + key[pos:]] = c
    return ExponentPoly(target, out)


def _recursion_blocks(d: int, a: tuple[int, ...]) -> dict[BitIndex, ExponentPoly]:
    """Blocks of a signature set on C_{2^a1} x ... x C_{2^ar}, by recursion on d."""
    r = len(a)
    grp = AbelianGroup([1 << ai for ai in a])
    if d == 1:
        one = ExponentPoly.one(grp)
        return {u: one for u in _all_indices(2)}

    ones = [i for i, ai in enumerate(a) if ai == 1]
    if ones:
        # split off a C_2 factor and take the product with a trivial set on it
        i = ones[-1]
        sub = _recursion_blocks(d - 1, a[:i] + a[i + 1 :])
        blocks: dict[BitIndex, ExponentPoly] = {}
        for u, poly in sub.items():
            lifted = _insert_zero_coordinate(poly, i, grp)
            for bit in (0, 1):
                blocks[u[:i] + (bit,) + u[i:]] = lifted
        return blocks

    # all exponents >= 2: run the doubling step on the two largest
    p = max(range(r), key=lambda i: a[i])
    q = max((i for i in range(r) if i != p), key=lambda i: a[i])
    a_sub = tuple(ai - 1 if i in (p, q) else ai for i, ai in enumerate(a))
    sub = _recursion_blocks(d - 1, a_sub)

    ap, aq = a[p], a[q]
    x = ExponentPoly.monomial(grp, _unit(r, p))
    y = ExponentPoly.monomial(grp, _unit(r, q))
    one = ExponentPoly.one(grp)
    xh = ExponentPoly.monomial(grp, _unit(r, p, 1 << (ap - 2)))
    yh = ExponentPoly.monomial(grp, _unit(r, q, 1 << (aq - 2)))
    mix = xh * yh

    # generator substitutions, as exponent vectors per source generator
    identity = [_unit(r, i) for i in range(r)]
    sub_xy2 = list(identity)
    sub_xy2[q] = _unit(r, q, 2)                      # A(x, y^2)
    sub_x2y = list(identity)
    sub_x2y[p] = _unit(r, p, 2)                      # A(x^2, y)
    sub_x2twist = list(sub_x2y)                      # A(x^2, x^(2^(ap-aq)) y)
    sub_x2twist[q] = tuple(
        (1 << (ap - aq)) if j == p else (1 if j == q else 0) for j in range(r)
    )

    def s(block: ExponentPoly, exp_map) -> ExponentPoly:
        return block.substitute(exp_map, grp)

    blocks = {}
    rest_positions = [i for i in range(r) if i not in (p, q)]
    for v_bits in itertools.product((0, 1), repeat=r - 2):
        def full(i: int, j: int) -> BitIndex:
            u = [0] * r
            u[p], u[q] = i, j
            for pos, b in zip(rest_positions, v_bits):
                u[pos] = b
            return tuple(u)

        a00, a01 = sub[full(0, 0)], sub[full(0, 1)]
        a10, a11 = sub[full(1, 0)], sub[full(1, 1)]
        blocks[full(0, 0)] = (one + xh) * s(a00, sub_xy2) + y * (one - xh) * s(a10, sub_xy2)
        blocks[full(0, 1)] = (one + xh) * s(a01, sub_xy2) + y * (one - xh) * s(a11, sub_xy2)
        blocks[full(1, 0)] = (one + yh) * s(a10, sub_x2y) + x * (one - yh) * s(a11, sub_x2y)
        blocks[full(1, 1)] = (one + mix) * s(a10, sub_x2twist) + x * (one - mix) * s(
            a11, sub_x2twist
        )
    return blocks


def abelian_signature_set(d: int, orders: Sequence[int]) -> SignatureSet:
    """Signature set on the abelian group with the given invariant factors.

    Requires d >= 1, 2 <= r <= d+1, orders non-increasing powers of 2 with
    sum of exponents 2d - r + 2 and largest exponent at most d - r + 2.
    """
    orders = [int(o) for o in orders]
    r = len(orders)
    if d < 1 or not 2 <= r <= d + 1:
        raise ValueError(f"need 2 <= r <= d+1, got r={r}, d={d}")
    exps = []
    for o in orders:
        if o < 2 or o & (o - 1):
            raise ValueError(f"order {o} is not a power of 2 (>= 2)")
        exps.append(o.bit_length() - 1)
    if any(exps[i] < exps[i + 1] for i in range(r - 1)):
        raise ValueError("orders must be non-increasing")
    if sum(exps) != 2 * d - r + 2:
        raise ValueError(
            f"exponent sum {sum(exps)} does not match 2d-r+2 = {2 * d - r + 2}"
        )
    if exps[0] > d - r + 2:
        raise ValueError(f"largest exponent {exps[0]} exceeds d-r+2 = {d - r + 2}")
    polys = _recursion_blocks(d, tuple(exps))
    return _realize_abelian(AbelianGroup(orders), polys)


# -- nonabelian constructors ----------------------------------------------------


def quaternion_signature_set() -> SignatureSet:
    """{A, A} with A = 1 - x - y - xy on the quaternion group, E = <x^2>."""
    q = quaternion8()
    x, y = 2, 1
    a = RingElement.from_support(q, {0: 1, x: -1, y: -1, q.op(x, y): -1})
    emb = ElemAbelianEmbedding(q, (q.op(x, x),))
    return SignatureSet(q, emb, {(0,): a, (1,): a})


def hds_times_c2_signature_set(h_group: FiniteGroup, d_set: RingElement) -> SignatureSet:
    """{D, D} on H x C_2 with respect to the new C_2 factor."""
    from .checks import assert_hadamard

    d_set = assert_hadamard(h_group, d_set, "hds_times_c2_signature_set")
    grp = direct_product(h_group, cyclic(2))
    coeffs = np.zeros(grp.order, dtype=np.int64)
    coeffs[0::2] = d_set.coeffs  # (h, 0) has index 2h
    lifted = RingElement(grp, coeffs)
    emb = ElemAbelianEmbedding(grp, (1,))
    return SignatureSet(grp, emb, {(0,): lifted, (1,): lifted})


def _central_involution_check(k: FiniteGroup, g: int) -> None:
    if k.element_order(g) != 2:
        raise ValueError(f"element {g} is not an involution")
    if g not in set(k.center()):
        raise ValueError(f"element {g} is not central")


def _pta_depth(k_order: int) -> int:
    e = k_order.bit_length() - 1
    if k_order != 1 << e or e < 3 or e % 2 == 0:
        raise ValueError(f"group order {k_order} is not of the form 2^(2d+1)")
    return (e - 1) // 2


def pta_signature_set(
    k: FiniteGroup, g: int, ts: Sequence[RingElement]
) -> SignatureSet:
    """{T, T} with T = prod T_i from modulus-2 ternary arrays covering K.

    Raises with distinct messages for a PTA failure versus a support failure.
    """
    from .checks import TernaryArray

    ts = [t.element if isinstance(t, TernaryArray) else t for t in ts]
    d = _pta_depth(k.order)
    if len(ts) != d:
        raise ValueError(f"need exactly {d} ternary arrays for |K| = {k.order}")
    _central_involution_check(k, g)
    for i, t in enumerate(ts):
        if t.group is not k:
            raise ValueError(f"array {i} lives in a different group")
        if not is_pta(t, 2):
            raise VerificationError(f"array {i} is not a perfect ternary array of modulus 2")
    cover = RingElement.from_support(k, {0: 1, g: 1})
    for t in ts:
        cover = cover * RingElement(k, np.abs(t.coeffs))
    if not np.all(cover.coeffs == 1):
        raise VerificationError(
            "support condition fails: (1+g) * prod supports does not tile the group"
        )
    t_total = ts[0]
    for t in ts[1:]:
        t_total = t_total * t
    emb = ElemAbelianEmbedding(k, (g,))
    return SignatureSet(k, emb, {(0,): t_total, (1,): t_total}, factors=list(ts))


def pta_mod2_candidates(k: FiniteGroup) -> list[tuple[int, int, RingElement]]:
    """Deduplicated 1 - x - y - xy candidates, in increasing (x, y) order.

    y ranges over involutions commuting with x, plus quaternion-type partners
    (x^2 = y^2, y x y^-1 = x^-1); every survivor is re-verified as a PTA.
    """
    out: list[tuple[int, int, RingElement]] = []
    seen: set[bytes] = set()
    invol = k.involutions()
    orders = k.element_orders()
    for x in range(1, k.order):
        xsq = k.op(x, x)
        xinv = k.inverse(x)
        partners: list[int] = []
        for y in invol:
            if y != x and k.op(x, y) == k.op(y, x):
                partners.append(y)
        if orders[x] == 4:
            for y in range(1, k.order):
                if orders[y] == 4 and k.op(y, y) == xsq and k.conjugate(y, x) == xinv:
                    partners.append(y)
        for y in sorted(set(partners)):
            xy = k.op(x, y)
            if len({0, x, y, xy}) != 4:
                continue
            t = RingElement.from_support(k, {0: 1, x: -1, y: -1, xy: -1})
            key = t.coeffs.tobytes()
            if key in seen:
                continue
            if not is_pta(t, 2):
                continue
            seen.add(key)
            out.append((x, y, t))
    return out


def extend_cover(
    cover_support: np.ndarray, factor_support: np.ndarray, mul: np.ndarray, n: int
) -> Optional[np.ndarray]:
    """Support of cover * factor if all products are distinct, else None."""
    prods = mul[np.ix_(cover_support, factor_support)].ravel()
    counts = np.bincount(prods, minlength=n)
    if counts.max() > 1:
        return None
    return np.flatnonzero(counts)


def pta_search_for_signature(
    k: FiniteGroup, g: int, *, node_budget: Optional[int] = None
) -> Optional[SignatureSet]:
    """Depth-first search for the ternary arrays behind pta_signature_set.

    Deterministic: candidates scanned in increasing index order, first hit
    wins. Returns None when the enumerated space is exhausted (or the node
    budget, if given, runs out).
    """
    d = _pta_depth(k.order)
    _central_involution_check(k, g)
    cands = pta_mod2_candidates(k)
    supports = [t.support() for _, _, t in cands]
    start = np.array(sorted((0, g)), dtype=np.int64)
    nodes = 0

    def dfs(level: int, cover: np.ndarray, picked: list[int]) -> Optional[list[int]]:
        nonlocal nodes
        if level == d:
            return picked if len(cover) == k.order else None
        for idx in range(len(cands)):
            if node_budget is not None and nodes >= node_budget:
                return None
            nodes += 1
            new = extend_cover(cover, supports[idx], k.mul, k.order)
            if new is None:
                continue
            hit = dfs(level + 1, new, picked + [idx])
            if hit is not None:
                return hit
        return None

    hit = dfs(0, start, [])
    if hit is None:
        return None
    return pta_signature_set(k, g, [cands[i][2] for i in hit])


# -- quotient-PTA blocks and automorphism transport -------------------------------


def block_from_quotient_pta(
    k: FiniteGroup,
    emb: ElemAbelianEmbedding,
    u: Sequence[int],
    hker: Iterable[int],
    a: RingElement,
) -> RingElement:
    """Confirm A chi A^(-1) = 2^(2j) chi from a modulus-2^j ternary array in
    K/Hker, and return A when it is a full signature block for chi_u.
    """
    from .groups import quotient

    if emb.parent is not k or a.group is not k:
        raise ValueError("embedding and element must live in the given group")
    center = set(k.center())
    if not set(emb.elements) <= center:
        raise ValueError("E must be central")
    hset = frozenset(int(h) for h in hker)
    if not hset <= set(emb.elements):
        raise ValueError("Hker must sit inside E")
    for h in hset:
        if emb.character_value(u, h) != 1:
            raise VerificationError("kernel condition fails: chi_u is not 1 on Hker")
    qgrp, proj = quotient(k, hset)
    pa = a.pushforward(proj)
    if not pa.is_ternary():
        raise VerificationError("pushforward is not ternary")
    auto = pa * pa.involution()
    msq = int(auto.coeffs[0])
    if auto != RingElement.scalar(qgrp, msq) or msq <= 0:
        raise VerificationError("pushforward is not a perfect ternary array")
    j2 = msq.bit_length() - 1
    if (1 << j2) != msq or j2 % 2:
        raise VerificationError(f"pushforward modulus squared {msq} is not 4^j")
    chi = character_element(emb, u)
    if a * chi * a.involution() != msq * chi:
        raise VerificationError("block identity A chi A^(-1) = 2^(2j) chi fails")
    if k.order != msq << emb.rank or not is_signature_block(k, emb, u, a):
        raise VerificationError(
            "identity holds but A is not a signature block "
            "(index or transversal condition fails)"
        )
    return a


def map_block(
    sigma: GroupMap,
    emb: ElemAbelianEmbedding,
    u: Sequence[int],
    a: RingElement,
) -> tuple[BitIndex, RingElement]:
    """Transport a block along an automorphism fixing E: returns (w, sigma(A))
    with sigma(chi_u) = chi_w."""
    k = emb.parent
    if sigma.source is not k or sigma.target is not k:
        raise ValueError("sigma must be an automorphism of the carrier")
    if not sigma.is_injective():
        raise ValueError("sigma is not bijective")
    if {int(sigma.images[e]) for e in emb.elements} != set(emb.elements):
        raise ValueError("sigma does not fix E")
    chi_image = character_element(emb, u).apply_map(sigma)
    w = tuple(0 if int(chi_image.coeffs[b]) == 1 else 1 for b in emb.basis)
    image = a.apply_map(sigma)
    if not is_signature_block(k, emb, w, image):
        raise VerificationError("transported block fails verification")
    return w, image
