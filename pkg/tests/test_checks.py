import numpy as np
import pytest

from hforge.checks import (
    TernaryArray,
    VerificationError,
    complement_ds,
    dillon_excluded,
    hadamard_params,
    is_hadamard_ds,
    is_pta,
    is_signature_block,
    minus_one_count_check,
    subset_indices,
    turyn_excluded,
    turyn_exponent_check,
    verify_hadamard,
    verify_hadamard_subset,
)
from hforge.groups import (
    AbelianGroup,
    ElemAbelianEmbedding,
    cyclic,
    dihedral,
    direct_product,
    elementary_abelian,
    quaternion8,
)
from hforge.ring import RingElement, character_element

from oracles import difference_multiset_oracle

BRUCK = [0, 8, 4, 2, 1, 15]


def bruck_group_and_set():
    g = elementary_abelian(4)
    return g, RingElement.pm1_from_subset(g, BRUCK)


def test_hadamard_params():
    p1 = hadamard_params(1)
    assert p1.triple() == (16, 6, 2)
    assert p1.n == 4
    assert hadamard_params(0).triple() == (4, 1, 0)
    assert hadamard_params(3).triple() == (256, 120, 56)
    assert p1.complement().triple() == (16, 10, 6)
    assert p1.complement().n == p1.n


def test_bruck_set_verifies():
    g, d = bruck_group_and_set()
    assert is_hadamard_ds(g, d)
    assert d * d.involution() == RingElement.scalar(g, 16)
    assert verify_hadamard(g, d).params == (16, 6, 2)


def test_trivial_singleton_set():
    v = elementary_abelian(2)
    assert is_hadamard_ds(v, [0])
    assert verify_hadamard(v, [0]).params == (4, 1, 0)


def test_random_subsets_against_oracle():
    g, _ = bruck_group_and_set()
    rng = np.random.default_rng(19)
    hits = 0
    for _ in range(300):
        k = int(rng.integers(0, 17))
        subset = list(rng.choice(16, size=k, replace=False))
        mine = is_hadamard_ds(g, subset)
        oracle = difference_multiset_oracle(g, subset)
        assert mine == oracle
        hits += mine
    # the all-but-Bruck complements exist; just ensure the loop saw both outcomes
    assert hits < 300


def test_verdict_failure_reasons():
    g = elementary_abelian(2)
    not_pm1 = RingElement.from_support(g, {0: 2})
    assert verify_hadamard(g, not_pm1).failure_reason == "not_pm1"
    wrong = RingElement.pm1_from_subset(g, [0, 1])
    assert verify_hadamard(g, wrong).failure_reason == "autocorrelation"


def test_complement():
    g, d = bruck_group_and_set()
    comp = complement_ds(d)
    assert is_hadamard_ds(g, comp)
    assert verify_hadamard(g, comp).params == (16, 10, 6)
    assert complement_ds(comp) == d
    assert sorted(subset_indices(comp)) == sorted(set(range(16)) - set(BRUCK))


def test_subset_form_cross_check():
    g, _ = bruck_group_and_set()
    assert verify_hadamard_subset(g, BRUCK)
    assert not verify_hadamard_subset(g, [0, 1, 2, 3, 4, 5])


def test_pta_examples():
    c4xc2 = direct_product(cyclic(4), cyclic(2))
    x, y = 2, 1
    t = RingElement.from_support(c4xc2, {0: 1, x: -1, y: -1, c4xc2.op(x, y): -1})
    assert is_pta(t, 2)
    assert is_pta(RingElement.one(c4xc2), 1)
    q = quaternion8()
    x, y = 2, 1
    tq = RingElement.from_support(q, {0: 1, x: -1, y: -1, q.op(x, y): -1})
    assert is_pta(tq, 2)
    assert not is_pta(tq, 3)
    with pytest.raises(VerificationError):
        TernaryArray(tq, 3)


def test_signature_block_examples():
    k = direct_product(cyclic(4), cyclic(4))
    x, y = 4, 1
    emb = ElemAbelianEmbedding(k, (k.op(x, x), k.op(y, y)))
    a_good = RingElement.from_support(k, {0: 1, x: 1, y: 1, k.op(x, y): -1})
    a_bad = RingElement.from_support(k, {0: 1, x: 1, y: 1, k.op(x, y): 1})
    assert is_signature_block(k, emb, (0, 0), a_good)
    assert a_good * character_element(emb, (0, 0)) * a_good.involution() == 4 * character_element(emb, (0, 0))
    assert not is_signature_block(k, emb, (0, 0), a_bad)
    # trivial signature block on C_2^r
    e2 = elementary_abelian(2)
    emb2 = ElemAbelianEmbedding(e2, (2, 1))
    one = RingElement.one(e2)
    for u in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        assert is_signature_block(e2, emb2, u, one)


def test_turyn_dillon_exclusion():
    assert turyn_excluded(cyclic(16))
    assert turyn_excluded(cyclic(64))
    assert dillon_excluded(dihedral(16))
    assert not turyn_excluded(elementary_abelian(4))
    assert not dillon_excluded(elementary_abelian(4))
    with pytest.raises(ValueError):
        turyn_excluded(cyclic(8))  # order not 2^(2d+2)


def test_turyn_exponent_check():
    assert turyn_exponent_check(direct_product(cyclic(8), cyclic(8)))
    c32xc2 = direct_product(cyclic(32), cyclic(2))
    assert not turyn_exponent_check(c32xc2)
    assert turyn_excluded(c32xc2)
    c16xc2xc2 = AbelianGroup([16, 2, 2]).to_group()
    assert turyn_exponent_check(c16xc2xc2)  # exponent 16 = 2^(d+2), boundary
    with pytest.raises(ValueError):
        turyn_exponent_check(quaternion8())


def test_minus_one_counts_c4sq():
    k = direct_product(cyclic(4), cyclic(4))
    x, y = 4, 1
    emb = ElemAbelianEmbedding(k, (k.op(x, x), k.op(y, y)))
    a = RingElement.from_support(k, {0: 1, x: 1, y: 1, k.op(x, y): -1})
    b01 = a * character_element(emb, (0, 1))
    assert int(np.count_nonzero(b01.coeffs == -1)) == 8
    assert minus_one_count_check(b01, (0, 1), 16, 2)
    b00 = a * character_element(emb, (0, 0))
    assert int(np.count_nonzero(b00.coeffs == -1)) in (4, 12)
    assert minus_one_count_check(b00, (0, 0), 16, 2)
    with pytest.raises(ValueError):
        minus_one_count_check(RingElement.one(k), (0, 0), 16, 2)


def test_complement_of_constructed_c8sq_set():
    from hforge.assembly import assemble_from_signature_set
    from hforge.groups import find_normal_abelian_subgroup
    from hforge.sigsets import abelian_signature_set

    c8sq = direct_product(cyclic(8), cyclic(8))
    _, emb_map = find_normal_abelian_subgroup(c8sq, [4, 4])
    d = assemble_from_signature_set(c8sq, emb_map, abelian_signature_set(2, [4, 4]))
    comp = complement_ds(d)
    verdict = verify_hadamard(c8sq, comp)
    assert verdict.valid and verdict.params == (64, 36, 20)
