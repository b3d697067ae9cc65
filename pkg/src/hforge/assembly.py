"""Turning signature sets and ternary arrays into verified difference sets.

Every operation re-verifies its output with the group-ring identity before
returning; nothing unverified leaves this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .checks import VerificationError, assert_hadamard, is_pta
from .groups import (
    AbelianGroup,
    ElemAbelianEmbedding,
    FiniteGroup,
    GroupMap,
    direct_product,
    elementary_abelian,
    is_normal,
)
from .ring import RingElement, character_element
from .sigsets import SignatureSet, pta_mod2_candidates

BitIndex = tuple[int, ...]


# -- Drisko coset-representative selection ------------------------------------


@dataclass
class DriskoInstance:
    """Conjugation action of G/K on the characters of E, per coset of K."""

    group: FiniteGroup
    k_elements: frozenset[int]
    embedding: ElemAbelianEmbedding
    coset_reps: list[int] = field(init=False)
    actions: list[tuple[int, ...]] = field(init=False)

    def __post_init__(self) -> None:
        g = self.group
        self.k_elements = frozenset(int(x) for x in self.k_elements)
        emb = self.embedding
        r = emb.rank
        if not set(emb.elements) <= self.k_elements:
            raise ValueError("E must be contained in K")
        if g.order % len(self.k_elements) or (
            g.order // len(self.k_elements) != 1 << r
        ):
            raise ValueError("K must have index 2^rank in G")
        if not is_normal(g, self.k_elements):
            raise ValueError("K is not normal in G")
        if not emb.is_normal_in_parent():
            raise ValueError("E is not normal in G")
        # the action must not depend on the representative: K has to fix the
        # characters pointwise, i.e. centralize E
        for k in self.k_elements:
            for b in emb.basis:
                if g.conjugate(k, b) != b:
                    raise ValueError(
                        "conjugation action is ill-defined: K does not centralize E"
                    )
        coset_of: dict[int, int] = {}
        reps: list[int] = []
        for h in range(g.order):
            if h in coset_of:
                continue
            cid = len(reps)
            reps.append(h)
            for x in self.k_elements:
                coset_of[g.op(h, x)] = cid
        self.coset_reps = reps
        actions = []
        for rep in reps:
            perm = []
            for code in range(1 << r):
                u = tuple((code >> (r - 1 - i)) & 1 for i in range(r))
                w = emb.conj_character_index(rep, u)
                perm.append(sum(b << (r - 1 - i) for i, b in enumerate(w)))
            if perm[0] != 0:
                raise VerificationError("principal character is not fixed")
            if sorted(perm) != list(range(1 << r)):
                raise VerificationError("coset action is not a permutation")
            actions.append(tuple(perm))
        self.actions = actions


def drisko_coset_reps(inst: DriskoInstance) -> dict[BitIndex, int]:
    """Transversal {g_u} with {g_u chi_u g_u^-1} = {chi_u}.

    Backtracking over assignments, most-constrained index first, candidates in
    increasing coset-representative order. A failure is an internal error: the
    underlying fixed-point theorem guarantees existence.
    """
    r = inst.embedding.rank
    size = 1 << r
    assign: dict[int, int] = {}
    used_cosets: set[int] = set()
    used_images: set[int] = set()

    def feasible(u: int) -> list[int]:
        return [
            c
            for c in range(size)
            if c not in used_cosets and inst.actions[c][u] not in used_images
        ]

    def solve() -> bool:
        pending = [u for u in range(size) if u not in assign]
        if not pending:
            return True
        u = min(pending, key=lambda v: (len(feasible(v)), v))
        for c in feasible(u):
            assign[u] = c
            used_cosets.add(c)
            used_images.add(inst.actions[c][u])
            if solve():
                return True
            del assign[u]
            used_cosets.remove(c)
            used_images.remove(inst.actions[c][u])
        return False

    if not solve():
        raise RuntimeError(
            "no valid coset assignment found; this contradicts the fixed-point "
            "guarantee and indicates a bug"
        )
    out = {}
    for u_code, c in assign.items():
        u = tuple((u_code >> (r - 1 - i)) & 1 for i in range(r))
        out[u] = inst.coset_reps[c]
    return out


# -- prehadamard assembly -------------------------------------------------------


def assemble_prehadamard(
    group: FiniteGroup,
    k_elements: Iterable[int],
    emb: ElemAbelianEmbedding,
    blocks: dict[BitIndex, RingElement],
) -> RingElement:
    """D = sum_u g_u A_u chi_u for a verified signature set supported on K <= G."""
    from .checks import is_signature_block

    k_set = frozenset(int(x) for x in k_elements)
    for u, a in blocks.items():
        if a.group is not group:
            raise ValueError("blocks must live in the ambient group ring")
        if not is_signature_block(group, emb, u, a, k_elems=k_set):
            raise VerificationError(
                f"block {''.join(map(str, u))} fails verification inside the ambient group"
            )
    inst = DriskoInstance(group, k_set, emb)
    reps = drisko_coset_reps(inst)
    d = RingElement.zero(group)
    for u, a in blocks.items():
        b = a * character_element(emb, u)
        d = d + b.translate_left(reps[u])
    return assert_hadamard(group, d, "assemble_prehadamard")


def embed_signature_set(
    group: FiniteGroup, emb_map: GroupMap, s: SignatureSet
) -> tuple[frozenset[int], ElemAbelianEmbedding, dict[BitIndex, RingElement]]:
    """Transport a signature set along an injective map of its carrier into G."""
    if emb_map.target is not group:
        raise ValueError("map target mismatch")
    if not emb_map.is_injective():
        raise ValueError("carrier map is not injective")
    if isinstance(emb_map.source, AbelianGroup):
        if s.abelian is None or emb_map.source.orders != s.abelian.orders:
            raise ValueError("map source does not match the set's carrier")
        carrier_map = GroupMap(
            s.abelian,
            group,
            list(emb_map.generator_images),
            validate=False,
        )
        blocks = {u: p.to_ring_element(carrier_map) for u, p in s.polys.items()}
        basis_imgs = tuple(
            int(carrier_map.images[s.abelian.index_of(e)])
            for e in s.abelian.torsion_basis_exps()
        )
    else:
        if emb_map.source is not s.group:
            raise ValueError("map source does not match the set's carrier")
        blocks = {u: a.embed(emb_map) for u, a in s.blocks.items()}
        basis_imgs = tuple(int(emb_map.images[b]) for b in s.embedding.basis)
    k_set = emb_map.image_set()
    ambient_emb = ElemAbelianEmbedding(group, basis_imgs)
    return k_set, ambient_emb, blocks


def assemble_from_signature_set(
    group: FiniteGroup, emb_map: GroupMap, s: SignatureSet
) -> RingElement:
    k_set, ambient_emb, blocks = embed_signature_set(group, emb_map, s)
    return assemble_prehadamard(group, k_set, ambient_emb, blocks)


def mcfarland_construct(j_group: FiniteGroup) -> tuple[FiniteGroup, RingElement]:
    """D = sum_u g_u chi_u in J x C_2^(d+1) for |J| = 2^(d+1)."""
    size = j_group.order
    r = size.bit_length() - 1
    if size != 1 << r or r < 1:
        raise ValueError("J must have 2-power order at least 2")
    e_part = elementary_abelian(r)
    g = direct_product(j_group, e_part)
    coeffs = np.zeros(g.order, dtype=np.int64)
    for j_idx in range(size):
        u = tuple((j_idx >> (r - 1 - i)) & 1 for i in range(r))
        for e_idx in range(e_part.order):
            bits = tuple((e_idx >> (r - 1 - i)) & 1 for i in range(r))
            sign = sum(a * b for a, b in zip(u, bits)) % 2
            coeffs[j_idx * e_part.order + e_idx] = -1 if sign else 1
    d = RingElement(g, coeffs)
    return g, assert_hadamard(g, d, "mcfarland_construct")


# -- products of perfect ternary arrays ------------------------------------------


def pta_product_search(
    group: FiniteGroup, *, node_budget: Optional[int] = None
) -> Optional[tuple[list[RingElement], RingElement]]:
    """d+1 modulus-2 ternary arrays whose supports tile G, and their product.

    Depth-first with the coefficient <= 1 prune on the running support
    product; deterministic first hit. None when the candidate space (or the
    node budget) is exhausted.
    """
    e = group.order.bit_length() - 1
    if group.order != 1 << e or e < 2 or e % 2:
        raise ValueError("order must be of the form 2^(2d+2)")
    depth = e // 2
    cands = pta_mod2_candidates(group)
    supports = [t.support() for _, _, t in cands]
    nodes = 0

    from .sigsets import extend_cover

    def dfs(level: int, cover: Optional[np.ndarray], picked: list[int]) -> Optional[list[int]]:
        nonlocal nodes
        if level == depth:
            return picked if cover is not None and len(cover) == group.order else None
        for idx in range(len(cands)):
            if node_budget is not None and nodes >= node_budget:
                return None
            nodes += 1
            new = (
                supports[idx]
                if cover is None
                else extend_cover(cover, supports[idx], group.mul, group.order)
            )
            if new is None:
                continue
            hit = dfs(level + 1, new, picked + [idx])
            if hit is not None:
                return hit
        return None

    hit = dfs(0, None, [])
    if hit is None:
        return None
    factors = [cands[i][2] for i in hit]
    d = factors[0]
    for t in factors[1:]:
        d = d * t
    for t in factors:
        if not is_pta(t, 2):
            raise VerificationError("search returned a non-PTA factor")
    return factors, assert_hadamard(group, d, "pta_product_search")


def cor_pta_ss_assemble(
    group: FiniteGroup,
    k_elements: Iterable[int],
    g_invol: int,
    s: SignatureSet,
    incl: GroupMap,
) -> RingElement:
    """Rank-1 assembly for a PTA-derived signature set on an index-2 subgroup."""
    k_set = frozenset(int(x) for x in k_elements)
    if len(k_set) * 2 != group.order:
        raise ValueError("K must have index 2")
    if g_invol not in set(group.center()):
        raise ValueError("the involution must be central in G")
    k_grp_set, emb, blocks = embed_signature_set(group, incl, s)
    if k_grp_set != k_set:
        raise ValueError("inclusion image does not match K")
    if emb.basis != (g_invol,):
        raise ValueError("signature set is not relative to <g>")
    return assemble_prehadamard(group, k_set, emb, blocks)


# -- modified signature sets and the stored final constructions -------------------


def modified_signature_assemble(
    group: FiniteGroup,
    emb: ElemAbelianEmbedding,
    blocks: dict[BitIndex, RingElement],
) -> RingElement:
    """D = sum_u A_u chi_u under the weakened conditions: ternary A_u with
    disjoint supports tiling a transversal of E, and the summed identity
    sum_u A_u chi_u A_u^(-1) = |G| / 2^r."""
    r = emb.rank
    if set(blocks) != set(itertools.product((0, 1), repeat=r)):
        raise ValueError("blocks must be indexed by all of {0,1}^r")
    if not emb.is_normal_in_parent():
        raise ValueError("E is not normal in G")
    union = np.zeros(group.order, dtype=np.int64)
    for u, a in blocks.items():
        if a.group is not group:
            raise ValueError("blocks must live in ZG")
        if not a.is_ternary():
            raise VerificationError(f"block {u} is not ternary-valued")
        union += np.abs(a.coeffs)
    if union.max() > 1:
        raise VerificationError("block supports are not disjoint")
    support = np.flatnonzero(union)
    if len(support) * len(emb) != group.order:
        raise VerificationError("union of supports has the wrong size for a transversal")
    seen = set()
    for g in support:
        coset = frozenset(group.op(int(g), e) for e in emb.elements)
        if coset in seen:
            raise VerificationError("union of supports is not a transversal of E")
        seen.add(coset)
    total = RingElement.zero(group)
    for u, a in blocks.items():
        chi = character_element(emb, u)
        total = total + a * chi * a.involution()
    if total != RingElement.scalar(group, group.order >> r):
        raise VerificationError("summed identity sum A_u chi_u A_u^(-1) = |G|/2^r fails")
    d = RingElement.zero(group)
    for u, a in blocks.items():
        d = d + a * character_element(emb, u)
    return assert_hadamard(group, d, "modified_signature_assemble")


def original_final_assemble(
    group: FiniteGroup, g_invol: int, d0: RingElement, d1: RingElement
) -> RingElement:
    """D = D_0 (1+g) + D_1 (1-g) for a central involution g.

    Three preconditions, each reported distinctly: the quotient image of D_0
    is a perfect ternary array of modulus sqrt(|G|)/2, the twisted
    autocorrelation D_1 (1-g) D_1^(-1) = (|G|/4)(1-g) holds, and the two
    summand supports partition G.
    """
    from .groups import quotient

    if group.element_order(g_invol) != 2 or g_invol not in set(group.center()):
        raise ValueError("g must be a central involution")
    if not d0.is_ternary() or not d1.is_ternary():
        raise VerificationError("D_0 and D_1 must be ternary-valued")
    qgrp, proj = quotient(group, (0, g_invol))
    p0 = d0.pushforward(proj)
    quarter = group.order // 4
    if (p0 * p0.involution()) != RingElement.scalar(qgrp, quarter):
        raise VerificationError(
            "projected autocorrelation fails: natural(D_0) natural(D_0)^(-1) != |G|/4"
        )
    one_minus_g = RingElement.from_support(group, {0: 1, g_invol: -1})
    one_plus_g = RingElement.from_support(group, {0: 1, g_invol: 1})
    if d1 * one_minus_g * d1.involution() != quarter * one_minus_g:
        raise VerificationError(
            "twisted autocorrelation fails: D_1 (1-g) D_1^(-1) != (|G|/4)(1-g)"
        )
    part0 = d0 * one_plus_g
    part1 = d1 * one_minus_g
    s0 = np.abs(part0.coeffs) > 0
    s1 = np.abs(part1.coeffs) > 0
    if np.any(s0 & s1) or not np.all(s0 | s1):
        raise VerificationError("supports of D_0(1+g) and D_1(1-g) do not partition G")
    return assert_hadamard(group, part0 + part1, "original_final_assemble")


def dillon_product(
    group: FiniteGroup,
    h1: Iterable[int],
    h2: Iterable[int],
    d1: RingElement,
    d2: RingElement,
) -> RingElement:
    """D = D_1 D_2 for an exact factorization G = H_1 H_2, H_1 cap H_2 = 1."""
    set1 = frozenset(int(x) for x in h1)
    set2 = frozenset(int(x) for x in h2)
    if len(set1 & set2) != 1 or len(set1) * len(set2) != group.order:
        raise ValueError("subgroups do not give an exact factorization of G")
    for s, d in ((set1, d1), (set2, d2)):
        if d.group is not group:
            raise ValueError("factor sets must live in ZG")
        if not d.is_pm1_on(s):
            raise ValueError("factor set is not +-1 on its subgroup")
        if (d * d.involution()) != RingElement.scalar(group, len(s)):
            raise VerificationError("factor is not a difference set in its subgroup")
    return assert_hadamard(group, d1 * d2, "dillon_product")


# -- best-effort transfer ---------------------------------------------------------

TRANSFER_DEFAULT_BUDGET = 10**8


def decompose_over_cosets(
    group: FiniteGroup, k_elements: Iterable[int], d: RingElement
) -> tuple[list[int], list[RingElement]]:
    """Write D = sum_u g_u D_u with D_u in ZK, over the minimal-rep transversal."""
    k_set = frozenset(int(x) for x in k_elements)
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for h in range(group.order):
        if h in coset_of:
            continue
        cid = len(reps)
        reps.append(h)
        for x in k_set:
            coset_of[group.op(h, x)] = cid
    parts = []
    for rep in reps:
        coeffs = np.zeros(group.order, dtype=np.int64)
        for x in k_set:
            coeffs[x] = d.coeffs[group.op(rep, x)]
        parts.append(RingElement(group, coeffs))
    return reps, parts


@dataclass
class TransferOutcome:
    result: Optional[RingElement]
    exhausted: bool  # False when the node budget stopped the search


def transfer_search(
    group: FiniteGroup,
    k_elements: Iterable[int],
    d: RingElement,
    target: FiniteGroup,
    k_target: Iterable[int],
    iso: GroupMap,
    *,
    node_budget: int = TRANSFER_DEFAULT_BUDGET,
) -> TransferOutcome:
    """Seek coset representatives {g'_u} in the target with
    sum_u g'_u phi(D_u) a difference set.

    Best effort: backtracking over (coset, representative) choices with a
    final verification per complete assignment; `exhausted` reports whether
    the whole space was covered within the node budget.
    """
    if group.order != target.order:
        raise ValueError("transfer requires groups of equal order")
    k_src, k_tgt = frozenset(k_elements), frozenset(int(x) for x in k_target)
    if iso.source_order() != len(k_src) or len(k_src) != len(k_tgt):
        raise ValueError("isomorphism does not match the subgroups")
    reps_src, parts_src = decompose_over_cosets(group, k_src, d)
    # transport each D_u into Z[target], supported on K'
    parts_tgt: list[RingElement] = []
    src_sorted = sorted(k_src)
    for part in parts_src:
        coeffs = np.zeros(target.order, dtype=np.int64)
        for pos, x in enumerate(src_sorted):
            if part.coeffs[x]:
                if isinstance(iso.source, AbelianGroup):
                    raise ValueError("iso must be given on the subgroup as a group")
                coeffs[int(iso.images[pos])] += int(part.coeffs[x])
        parts_tgt.append(RingElement(target, coeffs))
    # iso maps the extracted subgroup (sorted elements of K) onto K'
    if {int(v) for v in iso.images} != k_tgt:
        raise ValueError("isomorphism image does not equal the target subgroup")

    coset_of = np.empty(target.order, dtype=np.int64)
    reps_t: list[int] = []
    cosets_t: list[list[int]] = []
    seen = set()
    for h in range(target.order):
        if h in seen:
            continue
        cid = len(reps_t)
        reps_t.append(h)
        members = sorted(target.op(h, x) for x in k_tgt)
        cosets_t.append(members)
        for m in members:
            coset_of[m] = cid
            seen.add(m)
    q = len(reps_t)
    qmul = np.empty((q, q), dtype=np.int64)
    for i in range(q):
        for j in range(q):
            qmul[i, j] = coset_of[target.op(reps_t[i], target.inverse(reps_t[j]))]
    nodes = 0
    budget_hit = False
    from .checks import is_hadamard_ds

    def determined_ok(used: frozenset[int], partial: RingElement) -> bool:
        """Autocorrelation prune: cosets reachable only by assigned pairs must
        already vanish (off the identity coset)."""
        rest = [c for c in range(q) if c not in used]
        if len(rest) > 1:
            return True  # everything is still reachable by future pairs
        inside = {int(qmul[a, b]) for a in used for b in used if a != b}
        future = {int(qmul[a, r]) for a in used for r in rest}
        future |= {int(qmul[r, a]) for a in used for r in rest}
        checkable = inside - future - {0}
        if not checkable:
            return True
        auto = partial * partial.involution()
        for z in checkable:
            if np.any(auto.coeffs[cosets_t[z]] != 0):
                return False
        return True

    def dfs(slot: int, used: frozenset[int], partial: RingElement) -> Optional[RingElement]:
        nonlocal nodes, budget_hit
        if slot == q:
            return partial if is_hadamard_ds(target, partial) else None
        for cid in range(q):
            if cid in used:
                continue
            for rep in cosets_t[cid]:
                nodes += 1
                if nodes > node_budget:
                    budget_hit = True
                    return None
                new_partial = partial + parts_tgt[slot].translate_left(rep)
                new_used = used | {cid}
                if not determined_ok(new_used, new_partial):
                    continue
                hit = dfs(slot + 1, new_used, new_partial)
                if hit is not None:
                    return hit
                if budget_hit:
                    return None
        return None

    found = dfs(0, frozenset(), RingElement.zero(target))
    return TransferOutcome(result=found, exhausted=not budget_hit)
