import random
from fractions import Fraction as F

import pytest

from kzd import freelie as fl


GRAM = [[2, F(1, 3)], [F(1, 3), F(5, 2)]]


@pytest.fixture(scope="module")
def alg():
    return fl.make_algebra(GRAM)


def test_lyndon_basis_examples():
    assert fl.lyndon_basis((1, 0)) == (0,)
    assert fl.lyndon_basis((1, 1)) == ((0, 1),)
    # single element, the left-normed double bracket
    assert fl.lyndon_basis((2, 1)) == ((0, (0, 1)),)
    with pytest.raises(ValueError):
        fl.lyndon_basis((0, 0))


def test_witt_numbers_match_span_ranks_small():
    for deg in [(1,), (2,), (3,), (1, 1), (2, 1), (2, 2), (1, 1, 1), (2, 1, 1)]:
        w = fl.witt_dimension(deg)
        assert len(fl.lyndon_words(deg)) == w if w else True
        assert fl.bracketing_span_rank(deg) == w
        if w:
            assert len(fl.lyndon_basis(deg)) == w


def test_bracket_reduce_examples(alg):
    f1 = fl.generator(0, 2)
    f2 = fl.generator(1, 2)
    assert fl.bracket_reduce(f1, f1).is_zero()
    b = fl.bracket_reduce(f1, f2)
    assert b.degree == (1, 1) and b.coeffs == (F(1),)
    bb = fl.bracket_reduce(b, f1)
    # [[f1,f2],f1] = -[f1,[f1,f2]]
    assert bb.degree == (2, 1) and bb.coeffs == (F(-1),)


def test_bracket_bilinear_antisymmetric_jacobi(alg):
    rng = random.Random(2)
    r = 2

    def rand_elt(deg):
        basis = fl.lyndon_basis(deg)
        return fl.LieElement(deg, tuple(F(rng.randint(-4, 4)) for _ in basis))

    x = rand_elt((1, 1))
    y = rand_elt((1, 0))
    z = rand_elt((0, 1))
    xy = fl.bracket_reduce(x, y)
    yx = fl.bracket_reduce(y, x)
    assert (xy + yx).is_zero()
    jac = fl.bracket_reduce(fl.bracket_reduce(x, y), z) + \
        fl.bracket_reduce(fl.bracket_reduce(y, z), x) + \
        fl.bracket_reduce(fl.bracket_reduce(z, x), y)
    assert jac.is_zero()


def test_monomial_expansion_examples():
    f1 = fl.generator(0, 2)
    assert fl.monomial_expansion(f1).as_dict() == {(0,): F(1)}
    b = fl.bracket_reduce(f1, fl.generator(1, 2))
    assert fl.monomial_expansion(b).as_dict() == {(0, 1): F(1), (1, 0): F(-1)}
    bb = fl.from_tree((0, (0, 1)), 2)
    assert fl.monomial_expansion(bb).as_dict() == \
        {(0, 0, 1): F(1), (0, 1, 0): F(-2), (1, 0, 0): F(1)}


def test_delta_functional_examples():
    b = fl.bracket_reduce(fl.generator(0, 2), fl.generator(1, 2))
    assert fl.delta_functional((0, 1), b) == 1
    assert fl.delta_functional((1, 0), b) == -1
    assert fl.delta_functional((0,), fl.generator(0, 2)) == 1
    # degree mismatch pairs to zero by contract
    assert fl.delta_functional((0, 0), b) == 0


def test_delta_round_trip():
    # reconstructing the expansion from the coefficient functionals
    x = fl.from_tree((0, (0, 1)), 2)
    words = fl.words_of_degree((2, 1))
    rebuilt = {w: fl.delta_functional(w, x) for w in words}
    rebuilt = {w: c for w, c in rebuilt.items() if c}
    assert rebuilt == x.expand_words()


def test_ad_e_examples(alg):
    f1 = fl.generator(0, 2)
    lie, h = fl.ad_e(0, f1, alg)
    assert lie.is_zero() and h == 1
    lie, h = fl.ad_e(1, f1, alg)
    assert lie.is_zero() and h == 0
    b = fl.bracket_reduce(f1, fl.generator(1, 2))
    lie, h = fl.ad_e(0, b, alg)
    assert h == 0
    assert lie.degree == (0, 1) and lie.coeffs == (-alg.b(0, 1),)


def test_invariant_form_examples(alg):
    f1 = fl.generator(0, 2)
    e1 = fl.generator(0, 2, fl.PLUS)
    e2 = fl.generator(1, 2, fl.PLUS)
    assert fl.invariant_form_K(f1, e1, alg) == 1
    assert fl.invariant_form_K(f1, e2, alg) == 0
    b = fl.bracket_reduce(f1, fl.generator(1, 2))
    eb = fl.bracket_reduce(e1, e2)
    assert fl.invariant_form_K(b, eb, alg) == alg.b(0, 1)


def test_invariant_form_reassociation(alg):
    # the recursion value does not depend on how the n_+ argument is built
    rng = random.Random(9)
    e1 = fl.generator(0, 2, fl.PLUS)
    e2 = fl.generator(1, 2, fl.PLUS)
    f1 = fl.generator(0, 2)
    f2 = fl.generator(1, 2)
    x = fl.bracket_reduce(f1, fl.bracket_reduce(f1, f2))
    ya = fl.bracket_reduce(e1, fl.bracket_reduce(e1, e2))
    yb = fl.bracket_reduce(fl.bracket_reduce(e1, e2), e1).scale(F(-1))
    assert fl.invariant_form_K(x, ya, alg) == fl.invariant_form_K(x, yb, alg)
    for deg in [(2, 1), (2, 2), (3, 1)]:
        basis = fl.lyndon_basis(deg)
        if not basis:
            continue
        xs = fl.LieElement(deg, tuple(F(rng.randint(-3, 3)) for _ in basis))
        # re-associate a random plus element two ways through the Jacobi identity
        ys = fl.LieElement(deg, tuple(F(rng.randint(-3, 3)) for _ in basis), fl.PLUS)
        k1 = fl.invariant_form_K(xs, ys, alg)
        words = ys.expand_words()
        # feed the same element back through word coordinates
        ys2 = fl.from_words(deg, words, fl.PLUS)
        assert fl.invariant_form_K(xs, ys2, alg) == k1


def test_contravariant_gram_examples(alg):
    assert fl.contravariant_gram_n((1, 0), alg) == ((F(1),),)
    assert fl.contravariant_gram_n((1, 1), alg) == ((-alg.b(0, 1),),)
    alg0 = fl.make_algebra([[2, 0], [0, 2]])
    # vanishing pairing detects the Serre-type kernel
    assert fl.contravariant_gram_n((1, 1), alg0) == ((F(0),),)
    for deg in [(2, 1), (2, 2)]:
        g = fl.contravariant_gram_n(deg, alg)
        assert all(g[i][j] == g[j][i] for i in range(len(g)) for j in range(len(g)))


def test_quotient_dual_bases(alg):
    fb, eb = fl.quotient_dual_bases((1, 0), alg)
    assert len(fb) == 1 and fl.invariant_form_K(fb[0], eb[0], alg) == 1
    fb, eb = fl.quotient_dual_bases((1, 1), alg)
    assert len(fb) == 1
    # ebar = [e1,e2]/b_12
    assert eb[0].coeffs == (1 / alg.b(0, 1),)
    alg0 = fl.make_algebra([[2, 0], [0, 2]])
    assert fl.quotient_dual_bases((1, 1), alg0) == ((), ())


def test_quotient_duality_exact(alg):
    for deg in [(2, 1), (1, 1), (2, 2), (3, 1)]:
        fb, eb = fl.quotient_dual_bases(deg, alg)
        for l, x in enumerate(fb):
            for k, y in enumerate(eb):
                assert fl.invariant_form_K(x, y, alg) == (1 if l == k else 0)
