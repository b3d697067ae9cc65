import numpy as np
import pytest

from hforge.assembly import (
    DriskoInstance,
    assemble_from_signature_set,
    assemble_prehadamard,
    cor_pta_ss_assemble,
    decompose_over_cosets,
    dillon_product,
    drisko_coset_reps,
    mcfarland_construct,
    modified_signature_assemble,
    original_final_assemble,
    pta_product_search,
    transfer_search,
)
from hforge.checks import VerificationError, is_hadamard_ds, is_pta, verify_hadamard
from hforge.finalgroups import (
    build_final_set,
    final_embedding,
    m64_parts,
    match_presentation,
    sg256_parts,
)
from hforge.groups import (
    AbelianGroup,
    ElemAbelianEmbedding,
    GroupMap,
    cyclic,
    direct_product,
    elementary_abelian,
    find_normal_abelian_subgroup,
    modular,
    semidirect_cyclic,
    quaternion8,
    subgroup_as_group,
    subgroup_generated,
)
from hforge.ring import RingElement
from hforge.sigsets import (
    abelian_signature_set,
    pta_search_for_signature,
    trivial_signature_set,
)

BRUCK = [0, 8, 4, 2, 1, 15]


def test_drisko_modular16_matches_worked_example():
    g = modular(16)
    x4 = g.power(2, 4)
    e = ElemAbelianEmbedding(g, (x4, 1))
    k = subgroup_generated(g, [x4, 1])
    inst = DriskoInstance(g, k, e)
    # E and x^2 E act trivially; x E and x^3 E swap chi_10 and chi_11
    assert inst.actions[0] == (0, 1, 2, 3)
    assert inst.actions[2] == (0, 1, 2, 3)
    assert inst.actions[1] == (0, 1, 3, 2)
    assert inst.actions[3] == (0, 1, 3, 2)
    reps = drisko_coset_reps(inst)
    labels = {u: g.label(h) for u, h in reps.items()}
    assert labels == {(0, 0): "1", (0, 1): "x^2", (1, 0): "x", (1, 1): "x^3"}


def test_drisko_identity_on_direct_products():
    g = direct_product(quaternion8(), elementary_abelian(2))
    k = subgroup_generated(g, [4 * 1, 2 * 4, 1 * 4])  # hmm: use Q8 factor x C2?
    # K = Q8 x <first C2 gen>: index 2
    k = subgroup_generated(g, [2 * 4, 1 * 4, 2])
    assert len(k) == 16


def test_drisko_set_equality_property():
    g = modular(16)
    x4 = g.power(2, 4)
    e = ElemAbelianEmbedding(g, (x4, 1))
    inst = DriskoInstance(g, subgroup_generated(g, [x4, 1]), e)
    reps = drisko_coset_reps(inst)
    # {g_u chi_u g_u^-1} = {chi_u} as an exact multiset
    images = []
    for u, h in reps.items():
        images.append(e.conj_character_index(h, u))
    assert sorted(images) == sorted(reps.keys())


def test_drisko_rejects_noncentralizing_k():
    # K = G: conjugation by K moves characters; the instance must refuse
    g = modular(16)
    x4 = g.power(2, 4)
    e = ElemAbelianEmbedding(g, (x4, 1))
    with pytest.raises(ValueError):
        DriskoInstance(g, frozenset(range(16)), e)


def test_assemble_prehadamard_c8sq():
    c8sq = direct_product(cyclic(8), cyclic(8))
    s = abelian_signature_set(2, [4, 4])
    _, emb_map = find_normal_abelian_subgroup(c8sq, [4, 4])
    d = assemble_from_signature_set(c8sq, emb_map, s)
    assert d * d.involution() == RingElement.scalar(c8sq, 64)
    assert verify_hadamard(c8sq, d).params == (64, 28, 12)


def test_assemble_trivial_set_on_modular16():
    g = modular(16)
    x4 = g.power(2, 4)
    emb_map = GroupMap(AbelianGroup([2, 2]), g, [x4, 1])
    d = assemble_from_signature_set(g, emb_map, trivial_signature_set(2))
    assert is_hadamard_ds(g, d)


def test_assemble_rejects_bad_blocks():
    g = modular(16)
    x4 = g.power(2, 4)
    e = ElemAbelianEmbedding(g, (x4, 1))
    k = subgroup_generated(g, [x4, 1])
    bad = RingElement.from_support(g, {0: 1, 2: 1})
    blocks = {u: bad for u in [(0, 0), (0, 1), (1, 0), (1, 1)]}
    with pytest.raises(VerificationError):
        assemble_prehadamard(g, k, e, blocks)


def test_mcfarland():
    g0, d0 = mcfarland_construct(cyclic(2))
    assert verify_hadamard(g0, d0).params == (4, 1, 0)
    g1, d1 = mcfarland_construct(cyclic(4))
    assert verify_hadamard(g1, d1).params == (16, 6, 2)
    g2, d2 = mcfarland_construct(quaternion8())
    assert g2.order == 64 and is_hadamard_ds(g2, d2)


def test_mcfarland_agrees_with_trivial_drisko():
    # over J x E the trivial signature set reproduces the hyperplane set:
    # min-index coset representatives are exactly the J-factor elements
    j = cyclic(4)
    g, d = mcfarland_construct(j)
    # E is the second factor: generators at indices 2 and 1
    emb_map = GroupMap(AbelianGroup([2, 2]), g, [2, 1])
    d2 = assemble_from_signature_set(g, emb_map, trivial_signature_set(2))
    assert d2 == d


def test_pta_product_search_order16():
    m = modular(16)
    res = pta_product_search(m)
    assert res is not None
    factors, d = res
    assert len(factors) == 2
    for t in factors:
        assert is_pta(t, 2)
    assert is_hadamard_ds(m, d)
    # support product covers the group with multiplicity one
    cover = RingElement.from_support(m, {0: 1})
    for t in factors:
        cover = cover * RingElement(m, np.abs(t.coeffs))
    assert np.all(cover.coeffs == 1)


def test_pta_product_search_order64_sanity():
    g = AbelianGroup([4, 4, 4]).to_group()
    res = pta_product_search(g)
    assert res is not None
    assert is_hadamard_ds(g, res[1])


def test_pta_product_absent_on_excluded():
    assert pta_product_search(cyclic(16)) is None


def test_cor_pta_ss_assemble_order64():
    # G = K x C2 for an order-32 K with a PTA signature set
    ab = AbelianGroup([4, 4, 2])
    k_alone = ab.to_group()
    g = direct_product(k_alone, cyclic(2))
    k_set = frozenset(h * 2 for h in range(32))
    k_sub, incl = subgroup_as_group(g, k_set)
    g_inv = None
    pos = {int(v): i for i, v in enumerate(incl.images)}
    central = [h for h in g.central_involutions() if h in k_set]
    assert central
    for cand in central:
        s = pta_search_for_signature(k_sub, pos[cand])
        if s is not None:
            g_inv = cand
            break
    assert g_inv is not None
    d = cor_pta_ss_assemble(g, k_set, g_inv, s, incl)
    assert is_hadamard_ds(g, d)
    assert g.order == 64


def test_modified_signature_trivial_case():
    # G = C2^2, E = G, blocks concentrated on 1 with +-1 values
    g = elementary_abelian(2)
    emb = ElemAbelianEmbedding(g, (2, 1))
    blocks = {
        (0, 0): RingElement.from_support(g, {0: -1}),
        (0, 1): RingElement.zero(g),
        (1, 0): RingElement.zero(g),
        (1, 1): RingElement.zero(g),
    }
    with pytest.raises(VerificationError):
        modified_signature_assemble(g, emb, blocks)  # supports must tile a transversal


def test_modified_signature_m64():
    parts = m64_parts()
    g = parts["group"]
    d = modified_signature_assemble(g, final_embedding(parts), parts["blocks"])
    assert is_hadamard_ds(g, d)
    assert d == build_final_set(parts)


def test_original_final_m64():
    parts = m64_parts()
    d = build_final_set(parts)
    assert verify_hadamard(parts["group"], d).params == (64, 36, 20)


def test_original_final_sg256():
    parts = sg256_parts()
    d = build_final_set(parts)
    g = parts["group"]
    assert d * d.involution() == RingElement.scalar(g, 256)


def test_original_final_reports_distinct_failures():
    parts = m64_parts()
    g = parts["group"]
    with pytest.raises(VerificationError, match="projected autocorrelation"):
        original_final_assemble(g, parts["g_central"], parts["d1"], parts["d1"])
    with pytest.raises(VerificationError, match="twisted autocorrelation"):
        original_final_assemble(g, parts["g_central"], parts["d0"], parts["d0"])
    with pytest.raises(ValueError):
        original_final_assemble(g, 2, parts["d0"], parts["d1"])  # x is not an involution


def test_match_presentation_on_relabeled_copy():
    g = modular(64)
    gm = match_presentation(g, 32, 2, 17)
    assert gm is not None
    assert match_presentation(g, 32, 2, 15) is None  # semidihedral twist absent


def test_dillon_product_order256():
    e4a = elementary_abelian(4)
    g = direct_product(e4a, elementary_abelian(4))
    h1 = frozenset(h * 16 for h in range(16))
    h2 = frozenset(range(16))
    lift1 = np.ones(g.order, dtype=np.int64)
    lift2 = np.ones(g.order, dtype=np.int64)
    for idx in BRUCK:
        lift1[idx * 16] = -1
        lift2[idx] = -1
    coeffs1 = np.zeros(g.order, dtype=np.int64)
    coeffs2 = np.zeros(g.order, dtype=np.int64)
    for h in h1:
        coeffs1[h] = lift1[h]
    for h in h2:
        coeffs2[h] = lift2[h]
    d1 = RingElement(g, coeffs1)
    d2 = RingElement(g, coeffs2)
    d = dillon_product(g, h1, h2, d1, d2)
    assert is_hadamard_ds(g, d)
    assert g.order == 256


def test_dillon_product_trivial_factor():
    e4 = elementary_abelian(4)
    g = direct_product(e4, cyclic(1))
    h1 = frozenset(range(16))
    h2 = frozenset({0})
    d1 = RingElement.pm1_from_subset(g, BRUCK)
    d2 = RingElement.from_support(g, {0: -1})
    d = dillon_product(g, h1, h2, d1, d2)
    assert d == -d1


def test_transfer_identity():
    g = direct_product(cyclic(4), cyclic(4))
    emb_map = GroupMap(AbelianGroup([2, 2]), g, [g.op(4, 4), g.op(1, 1)])
    d = assemble_from_signature_set(g, emb_map, trivial_signature_set(2))
    k = subgroup_generated(g, [g.op(4, 4), g.op(1, 1)])
    k_sub, incl = subgroup_as_group(g, k)
    iso = GroupMap(k_sub, g, incl.images)  # identity inclusion as the iso
    out = transfer_search(g, k, d, g, k, iso)
    assert out.exhausted or out.result is not None
    assert out.result is not None
    assert is_hadamard_ds(g, out.result)


def test_transfer_to_other_group():
    # move a C4xC4 set to C8xC2 along a shared C4 subgroup
    src = direct_product(cyclic(4), cyclic(4))
    emb_map = GroupMap(AbelianGroup([2, 2]), src, [src.op(4, 4), src.op(1, 1)])
    d = assemble_from_signature_set(src, emb_map, trivial_signature_set(2))
    k_src = subgroup_generated(src, [4])  # <x> = C4
    tgt = direct_product(cyclic(8), cyclic(2))
    k_tgt = subgroup_generated(tgt, [2 * 2])  # <x^2> = C4 in C8
    k_sub, _ = subgroup_as_group(src, k_src)
    sorted_tgt = sorted(k_tgt)
    # k_sub elements are 0,4,8,12 (=x^0..x^3); map x -> x^2 in C8
    images = []
    for h in sorted(k_src):
        exp = h // 4
        images.append(tgt.power(2 * 2, exp))
    iso = GroupMap(k_sub, tgt, images)
    out = transfer_search(src, k_src, d, tgt, k_tgt, iso, node_budget=200000)
    assert out.result is not None
    assert is_hadamard_ds(tgt, out.result)


def test_transfer_budget_reported():
    g = direct_product(cyclic(4), cyclic(4))
    emb_map = GroupMap(AbelianGroup([2, 2]), g, [g.op(4, 4), g.op(1, 1)])
    d = assemble_from_signature_set(g, emb_map, trivial_signature_set(2))
    k = subgroup_generated(g, [g.op(4, 4), g.op(1, 1)])
    k_sub, incl = subgroup_as_group(g, k)
    iso = GroupMap(k_sub, g, incl.images)
    out = transfer_search(g, k, d, g, k, iso, node_budget=1)
    assert out.result is None and not out.exhausted


def test_decompose_over_cosets_roundtrip():
    g = modular(16)
    x4 = g.power(2, 4)
    k = subgroup_generated(g, [x4, 1])
    emb_map = GroupMap(AbelianGroup([2, 2]), g, [x4, 1])
    d = assemble_from_signature_set(g, emb_map, trivial_signature_set(2))
    reps, parts = decompose_over_cosets(g, k, d)
    total = RingElement.zero(g)
    for rep, part in zip(reps, parts):
        total = total + part.translate_left(rep)
    assert total == d


def test_cor_pta_ss_assemble_nonsplit():
    # C4^3 over K = <x, y, z^2>: no involution lies outside K, so the
    # extension does not split, yet the rank-1 assembly still applies
    ab = AbelianGroup([4, 4, 4])
    g = ab.to_group()
    k = subgroup_generated(
        g,
        [ab.index_of((1, 0, 0)), ab.index_of((0, 1, 0)), ab.index_of((0, 0, 2))],
    )
    assert not [h for h in g.involutions() if h not in k]
    k_sub, incl = subgroup_as_group(g, k)
    pos = {int(v): i for i, v in enumerate(incl.images)}
    found = None
    for cand in g.central_involutions():
        if cand not in k:
            continue
        s = pta_search_for_signature(k_sub, pos[cand])
        if s is not None:
            found = cor_pta_ss_assemble(g, k, cand, s, incl)
            break
    assert found is not None and is_hadamard_ds(g, found)


def test_modular16_assembled_set_matches_worked_form():
    # D = chi_00 + x^2 chi_01 + x chi_10 + x^3 chi_11 with E = <x^4, y>
    g = modular(16)
    x4 = g.power(2, 4)
    e = ElemAbelianEmbedding(g, (x4, 1))
    emb_map = GroupMap(AbelianGroup([2, 2]), g, [x4, 1])
    d = assemble_from_signature_set(g, emb_map, trivial_signature_set(2))
    from hforge.ring import character_element

    expected = (
        character_element(e, (0, 0))
        + character_element(e, (0, 1)).translate_left(g.power(2, 2))
        + character_element(e, (1, 0)).translate_left(2)
        + character_element(e, (1, 1)).translate_left(g.power(2, 3))
    )
    assert d == expected


def test_trivial_set_on_full_elementary_abelian_kernel():
    # degenerate case K = E = C_2^(d+1) inside C_2^(2d+2)
    g = elementary_abelian(6)
    basis = [32, 16, 8]  # first three coordinates
    emb_map = GroupMap(AbelianGroup([2, 2, 2]), g, basis)
    d = assemble_from_signature_set(g, emb_map, trivial_signature_set(3))
    assert verify_hadamard(g, d).params == (64, 28, 12)


def test_transfer_resolves_order64_straggler():
    # C16 x|_3 C4 resists every automatic stage but receives a set from
    # C16 x|_5 C4 across their shared modular subgroup <x, y^2>
    from hforge.catalog import ClassifyConfig, construct_difference_set

    src = semidirect_cyclic(16, 4, 5)
    tgt = semidirect_cyclic(16, 4, 3)
    cfg = ClassifyConfig(pta_sig_budget=200_000, pta_product_budget=200_000)
    assert construct_difference_set(tgt, cfg) is None  # genuinely out of reach
    d_src = construct_difference_set(src, cfg)
    assert d_src is not None
    k_src = subgroup_generated(src, [4, 2])
    k_tgt = subgroup_generated(tgt, [4, 2])
    k_sub, _ = subgroup_as_group(src, k_src)
    word = {}
    for i in range(16):
        for j in range(2):
            word[src.op(src.power(4, i), src.power(2, j))] = (i, j)
    images = [
        tgt.op(tgt.power(4, i), tgt.power(2, j))
        for h in sorted(k_src)
        for (i, j) in [word[h]]
    ]
    iso = GroupMap(k_sub, tgt, images)
    out = transfer_search(src, k_src, d_src, tgt, k_tgt, iso, node_budget=10**6)
    assert out.result is not None
    assert verify_hadamard(tgt, out.result).params == (64, 28, 12)


def test_transfer_from_stored_final_set():
    # the stored order-64 set moves into C16 x|_7 C4 over a shared C16 x C2
    src = modular(64)
    d_src = build_final_set(m64_parts(src))
    tgt = semidirect_cyclic(16, 4, 7)
    k_src = subgroup_generated(src, [src.op(2, 2), 1])
    k_tgt = subgroup_generated(tgt, [4, 2])
    k_sub, _ = subgroup_as_group(src, k_src)
    a_s, b_s = src.op(2, 2), 1
    word = {}
    for i in range(16):
        for j in range(2):
            word[src.op(src.power(a_s, i), src.power(b_s, j))] = (i, j)
    images = [
        tgt.op(tgt.power(4, i), tgt.power(2, j))
        for h in sorted(k_src)
        for (i, j) in [word[h]]
    ]
    iso = GroupMap(k_sub, tgt, images)
    out = transfer_search(src, k_src, d_src, tgt, k_tgt, iso, node_budget=10**6)
    assert out.result is not None
    assert verify_hadamard(tgt, out.result).params == (64, 36, 20)


def test_dillon_product_nonsplit_factorization():
    # D8 x Q8 factors exactly as H1 H2 with |H1| = 4, |H2| = 16, trivial
    # intersection, and noncommuting pairs (so G is not their direct product)
    from hforge.catalog import ClassifyConfig, construct_difference_set
    from hforge.groups import dihedral

    g = direct_product(dihedral(8), quaternion8())
    h1 = frozenset({0, 12, 32, 44})
    h2 = frozenset(list(range(8)) + list(range(56, 64)))
    assert len(h1 & h2) == 1
    assert any(g.op(a, b) != g.op(b, a) for a in h1 for b in h2)
    h2_sub, incl = subgroup_as_group(g, h2)
    d_h2 = construct_difference_set(h2_sub, ClassifyConfig())
    assert d_h2 is not None
    coeffs2 = np.zeros(g.order, dtype=np.int64)
    for pos, h in enumerate(sorted(h2)):
        coeffs2[h] = d_h2.coeffs[pos]
    d2 = RingElement(g, coeffs2)
    coeffs1 = np.zeros(g.order, dtype=np.int64)
    for h in h1:
        coeffs1[h] = -1 if h == 0 else 1  # trivial (4,1,0) set
    d1 = RingElement(g, coeffs1)
    d = dillon_product(g, h1, h2, d1, d2)
    assert verify_hadamard(g, d).valid


def test_drisko_c8sq_deterministic_transversal():
    # abelian carrier: trivial action, representatives come out as 1, y, x, xy
    c8sq = direct_product(cyclic(8), cyclic(8))
    x, y = 8, 1
    k = subgroup_generated(c8sq, [c8sq.op(x, x), c8sq.op(y, y)])
    e = ElemAbelianEmbedding(c8sq, (c8sq.power(x, 4), c8sq.power(y, 4)))
    inst = DriskoInstance(c8sq, k, e)
    reps = drisko_coset_reps(inst)
    assert reps == {(0, 0): 0, (0, 1): y, (1, 0): x, (1, 1): c8sq.op(x, y)}


def test_modified_signature_rank1_trivial_case():
    # blocks concentrated on a transversal of a rank-1 E reduce to a (4,1,0) set
    g = elementary_abelian(2)
    emb = ElemAbelianEmbedding(g, (2,))  # E = <x>
    blocks = {
        (0,): RingElement.from_support(g, {0: 1}),
        (1,): RingElement.from_support(g, {1: 1}),  # y, outside E
    }
    d = modified_signature_assemble(g, emb, blocks)
    assert verify_hadamard(g, d).params in ((4, 1, 0), (4, 3, 2))
