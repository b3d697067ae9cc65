import random

import numpy as np
import pytest

from hforge import kernels
from hforge.groups import (
    AbelianGroup,
    ElemAbelianEmbedding,
    GroupMap,
    cyclic,
    direct_product,
    elementary_abelian,
    modular,
    quaternion8,
    quotient,
    subgroup_generated,
)
from hforge.ring import ExponentPoly, RingElement, character_element, group_sum

from oracles import convolve_oracle, poly_add, poly_mul, poly_terms


def rand_pm1(group, rng):
    return RingElement(group, rng.choice([-1, 1], size=group.order).astype(np.int64))


def rand_small(group, rng):
    return RingElement(group, rng.integers(-3, 4, size=group.order).astype(np.int64))


TEST_GROUPS = [
    lambda: cyclic(8),
    lambda: quaternion8(),
    lambda: modular(16),
    lambda: direct_product(cyclic(4), cyclic(4)),
    lambda: elementary_abelian(4),
]


@pytest.mark.parametrize("make", TEST_GROUPS)
def test_convolution_matches_oracle(make):
    g = make()
    rng = np.random.default_rng(7)
    for _ in range(100):
        a, b = rand_small(g, rng), rand_small(g, rng)
        assert (a * b).coeffs.tolist() == convolve_oracle(g, a.coeffs, b.coeffs)


def test_convolution_pm1_oracle_100_pairs():
    g = modular(16)
    rng = np.random.default_rng(11)
    for _ in range(100):
        a, b = rand_pm1(g, rng), rand_pm1(g, rng)
        assert (a * b).coeffs.tolist() == convolve_oracle(g, a.coeffs, b.coeffs)


def test_backends_agree():
    g = direct_product(cyclic(4), cyclic(4))
    rng = np.random.default_rng(3)
    py = kernels.get_impl("py")
    for _ in range(10):
        a, b = rand_small(g, rng), rand_small(g, rng)
        out_default = kernels.convolve(a.coeffs, b.coeffs, g.mul)
        out_py = kernels.convolve(a.coeffs, b.coeffs, g.mul, impl=py)
        assert np.array_equal(out_default, out_py)


def test_c_backend_builds():
    # the compiled extension is expected in a built tree; fall back elsewhere
    assert kernels.BACKEND in ("c", "py")


def test_ring_identity_and_associativity():
    g = quaternion8()
    one = RingElement.one(g)
    rng = np.random.default_rng(5)
    a, b, c = (rand_small(g, rng) for _ in range(3))
    assert one * a == a and a * one == a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_overflow_guard():
    g = cyclic(4)
    big = RingElement(g, np.full(4, 2**31, dtype=np.int64))
    with pytest.raises(OverflowError):
        big * big


def test_involution_examples():
    c4 = cyclic(4)
    a = RingElement.from_support(c4, {0: 1, 1: 1})  # 1 + x
    assert a.involution() == RingElement.from_support(c4, {0: 1, 3: 1})
    assert a.involution().involution() == a


def test_involution_antiautomorphism():
    q = quaternion8()
    rng = np.random.default_rng(13)
    for _ in range(25):
        a, b = rand_pm1(q, rng), rand_pm1(q, rng)
        assert (a * b).involution() == b.involution() * a.involution()


def test_character_elements_c2sq():
    e2 = elementary_abelian(2)
    emb = ElemAbelianEmbedding(e2, (2, 1))  # x, y
    chi = {u: character_element(emb, u) for u in [(0, 0), (0, 1), (1, 0), (1, 1)]}
    # chi_01 = 1 + x - y - xy
    assert chi[(0, 1)] == RingElement(e2, [1, -1, 1, -1])
    assert chi[(1, 1)] == RingElement(e2, [1, -1, -1, 1])
    assert chi[(0, 0)] == group_sum(e2)
    for u, c in chi.items():
        assert c.involution() == c


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_character_orthogonality(rank):
    g = elementary_abelian(rank)
    emb = ElemAbelianEmbedding(g, tuple(1 << (rank - 1 - i) for i in range(rank)))
    import itertools

    indices = list(itertools.product((0, 1), repeat=rank))
    chis = {u: character_element(emb, u) for u in indices}
    total = RingElement.zero(g)
    for u in indices:
        total = total + chis[u]
        for v in indices:
            prod = chis[u] * chis[v].involution()
            if u == v:
                assert prod == (1 << rank) * chis[u]
            else:
                assert prod == RingElement.zero(g)
        expect = (1 << rank) if all(b == 0 for b in u) else 0
        assert chis[u].coeff_sum() == expect
    assert total == RingElement.scalar(g, 1 << rank)


def test_character_rank_mismatch():
    g = elementary_abelian(2)
    emb = ElemAbelianEmbedding(g, (2, 1))
    with pytest.raises(ValueError):
        character_element(emb, (0, 1, 1))


def test_is_pm1_on():
    e4 = elementary_abelian(4)
    bruck = RingElement.pm1_from_subset(e4, [0, 8, 4, 2, 1, 15])
    assert bruck.is_pm1_on(range(16))
    zero = RingElement.zero(e4)
    assert not zero.is_pm1_on([0, 1])
    k = direct_product(cyclic(4), cyclic(4))
    x, y = 4, 1
    a = RingElement.from_support(k, {0: 1, x: 1, y: 1, k.op(x, y): -1})
    transversal = [0, x, y, k.op(x, y)]
    assert a.is_pm1_on(transversal)


def test_translate_and_conjugate():
    g = modular(16)
    rng = np.random.default_rng(2)
    a = rand_small(g, rng)
    for h in (1, 2, 5):
        left = a.translate_left(h)
        assert left == RingElement.basis(g, h) * a
        right = a.translate_right(h)
        assert right == a * RingElement.basis(g, h)
        conj = a.conjugate_by(h)
        assert conj == RingElement.basis(g, h) * a * RingElement.basis(g, g.inverse(h))


def test_pushforward_subgroup_sum():
    g = modular(16)
    n = subgroup_generated(g, [g.power(2, 4)])
    q, proj = quotient(g, n)
    total = RingElement.subgroup_sum(g, n)
    assert total.pushforward(proj) == RingElement.scalar(q, len(n))


def test_pushforward_commutes_with_involution():
    g = direct_product(cyclic(4), cyclic(4))
    n = subgroup_generated(g, [g.op(1, 1)])
    q, proj = quotient(g, n)
    rng = np.random.default_rng(17)
    for _ in range(10):
        a = rand_small(g, rng)
        assert a.pushforward(proj).involution() == a.involution().pushforward(proj)


def test_pushforward_pta_example():
    # 1 - X - Y - XY in C4^2 maps to a modulus-2 perfect ternary array mod <Y^2>
    k = direct_product(cyclic(4), cyclic(4))
    x, y = 4, 1
    a = RingElement.from_support(k, {0: 1, x: -1, y: -1, k.op(x, y): -1})
    q, proj = quotient(k, subgroup_generated(k, [k.op(y, y)]))
    pa = a.pushforward(proj)
    assert pa.is_ternary()
    assert pa * pa.involution() == RingElement.scalar(q, 4)


def test_embed_and_multiply_commute():
    c8sq = direct_product(cyclic(8), cyclic(8))
    ab = AbelianGroup([4, 4])
    emb = GroupMap(ab, c8sq, [c8sq.op(8, 8), c8sq.op(1, 1)])
    rng = random.Random(23)
    grp44 = ab.to_group()
    inner = GroupMap(ab, grp44, [ab.index_of((1, 0)), ab.index_of((0, 1))])
    for _ in range(10):
        p = ExponentPoly(
            ab,
            {
                (rng.randrange(4), rng.randrange(4)): rng.choice([-1, 1])
                for _ in range(5)
            },
        )
        q = ExponentPoly(
            ab,
            {
                (rng.randrange(4), rng.randrange(4)): rng.choice([-1, 1])
                for _ in range(5)
            },
        )
        lhs = (p * q).to_ring_element(emb)
        rhs = p.to_ring_element(emb) * q.to_ring_element(emb)
        assert lhs == rhs


def test_embed_identity_and_collision():
    c4 = cyclic(4)
    ab = AbelianGroup([4])
    m = GroupMap(ab, c4, [1])
    one = ExponentPoly.one(ab)
    assert one.to_ring_element(m) == RingElement.one(c4)
    bad = GroupMap(AbelianGroup([4]), cyclic(2), [1], validate=False)
    p = ExponentPoly(AbelianGroup([4]), {(0,): 1, (2,): 1})
    with pytest.raises(ValueError):
        p.to_ring_element(bad)


def test_exponent_poly_substitution_golden():
    # A(x, y^2) on C4^2: 1+x+y-xy -> 1+x+y^2-xy^2
    ab = AbelianGroup([4, 4])
    a = ExponentPoly(ab, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): -1})
    sub = a.substitute([(1, 0), (0, 2)], ab)
    assert sub.coeffs == poly_terms(
        (4, 4), [(1, (0, 0)), (1, (1, 0)), (1, (0, 2)), (-1, (1, 2))]
    )
    # A_11 = 1+x-x^2 y+xy under (x -> x^2, y -> xy): 1+x^2-x^5 y+x^3 y
    ab8 = AbelianGroup([8, 8])
    a11 = ExponentPoly(ab8, {(0, 0): 1, (1, 0): 1, (2, 1): -1, (1, 1): 1})
    sub2 = a11.substitute([(2, 0), (1, 1)], ab8)
    assert sub2.coeffs == poly_terms(
        (8, 8), [(1, (0, 0)), (1, (2, 0)), (-1, (5, 1)), (1, (3, 1))]
    )
    # identity map
    ident = a.substitute([(1, 0), (0, 1)], ab)
    assert ident == a


def test_exponent_poly_arithmetic_against_oracle():
    ab = AbelianGroup([4, 2])
    rng = random.Random(5)
    for _ in range(20):
        t1 = [(rng.choice([-2, -1, 1, 2]), (rng.randrange(4), rng.randrange(2))) for _ in range(4)]
        t2 = [(rng.choice([-2, -1, 1, 2]), (rng.randrange(4), rng.randrange(2))) for _ in range(4)]
        p1, p2 = ExponentPoly(ab, dict()), ExponentPoly(ab, dict())
        p1 = ExponentPoly(ab, poly_terms((4, 2), t1))
        p2 = ExponentPoly(ab, poly_terms((4, 2), t2))
        assert (p1 * p2).coeffs == poly_mul(p1.coeffs, p2.coeffs, (4, 2))
        assert (p1 + p2).coeffs == poly_add(p1.coeffs, p2.coeffs)


def test_ring_element_text_pairs():
    g = cyclic(4)
    a = RingElement.from_support(g, {0: 1, 2: -3})
    assert a.to_pairs() == [(0, 1), (2, -3)]


def test_group_mismatch_rejected():
    a = RingElement.one(cyclic(4))
    b = RingElement.one(cyclic(4))
    with pytest.raises(ValueError):
        a * b


def test_forced_py_backend_selected_at_import():
    import os
    import subprocess
    import sys

    code = (
        "from hforge import kernels\n"
        "assert kernels.BACKEND == 'py', kernels.BACKEND\n"
        "from hforge.groups import quaternion8\n"
        "from hforge.ring import RingElement\n"
        "q = quaternion8()\n"
        "a = RingElement.pm1_from_subset(q, [0, 2])\n"
        "assert (a * a.involution()).coeffs[0] == 8\n"
        "print('ok')\n"
    )
    env = dict(os.environ, HFORGE_KERNEL="py")
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ok"


def test_embed_block_support_into_c8sq():
    # A_00 on C4^2 lands on {1, x^2, y^2, x^2 y^2} inside C8^2
    c8sq = direct_product(cyclic(8), cyclic(8))
    ab = AbelianGroup([4, 4])
    m = GroupMap(ab, c8sq, [c8sq.op(8, 8), c8sq.op(1, 1)])
    a00 = ExponentPoly(ab, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): -1})
    elt = a00.to_ring_element(m)
    x2, y2 = c8sq.op(8, 8), c8sq.op(1, 1)
    assert sorted(int(i) for i in elt.support()) == sorted(
        [0, x2, y2, c8sq.op(x2, y2)]
    )


def test_from_support_to_pairs_roundtrip():
    g = modular(16)
    rng = np.random.default_rng(31)
    a = rand_small(g, rng)
    again = RingElement.from_support(g, dict(a.to_pairs()))
    assert again == a


def test_exponent_poly_involution_antiautomorphism():
    ab = AbelianGroup([8, 4])
    rng = random.Random(9)
    for _ in range(20):
        p = ExponentPoly(
            ab,
            {(rng.randrange(8), rng.randrange(4)): rng.choice([-1, 1]) for _ in range(4)},
        )
        q = ExponentPoly(
            ab,
            {(rng.randrange(8), rng.randrange(4)): rng.choice([-1, 1]) for _ in range(4)},
        )
        assert (p * q).involution() == p.involution() * q.involution()
        assert p.involution().involution() == p
