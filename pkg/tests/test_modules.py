import random
from fractions import Fraction as F

import pytest

from kzd import freelie as fl, modules as wm, ratlin


@pytest.fixture(scope="module")
def sl2_like():
    alg = fl.make_algebra([[2]])
    hw = wm.make_weights([[3], [F(5, 2)]], [[1, F(1, 2)], [F(1, 2), 2]])
    return alg, hw


@pytest.fixture(scope="module")
def rank2():
    alg = fl.make_algebra([[2, F(1, 3)], [F(1, 3), F(5, 2)]])
    hw = wm.make_weights([[3, F(1, 2)], [F(5, 2), F(7, 5)]],
                         [[1, F(1, 2)], [F(1, 2), 2]])
    return alg, hw


def test_enumerate_basis_examples():
    assert wm.enumerate_basis((1,), 2) == [((0,), ()), ((), (0,))]
    assert wm.enumerate_basis((2,), 1) == [((0, 0),)]
    got = wm.enumerate_basis((1, 1), 2)
    assert len(got) == 6
    assert set(got) == {((0, 1), ()), ((0,), (1,)), ((1,), (0,)),
                        ((1, 0), ()), ((), (0, 1)), ((), (1, 0))}


def test_apply_generator_examples(sl2_like):
    alg, _ = sl2_like
    hw1 = wm.make_weights([[3]], [[1]])
    m1 = wm.WeightModule(alg, hw1, (1,))
    # e f v = (Lambda, alpha) v on the highest vector
    assert m1.apply_e_factor(0, 0, {((0,),): F(1)}) == {((),): F(3)}
    # e v = 0
    assert m1.apply_e_factor(0, 0, {((),): F(1)}) == {}
    m2 = wm.WeightModule(alg, hw1, (2,))
    # e f f v = (2 (Lambda,alpha) - b_11) f v
    assert m2.apply_e_factor(0, 0, {((0, 0),): F(1)}) == {((0,),): F(4)}
    # f out of the tracked range
    with pytest.raises(ValueError):
        m1.apply_generator("f", 0, 0, {((0,),): F(1)})


def test_shapovalov_examples(sl2_like):
    alg, hw = sl2_like
    assert wm.WeightModule(alg, hw, (0,)).shapovalov_gram() == [[F(1)]]
    hw1 = wm.make_weights([[3]], [[1]])
    assert wm.WeightModule(alg, hw1, (1,)).shapovalov_gram() == [[F(3)]]
    g = wm.WeightModule(alg, hw, (1,)).shapovalov_gram()
    assert g == [[F(3), F(0)], [F(0), F(5, 2)]]


def test_weight_space_orthogonality(rank2):
    alg, hw = rank2
    mod = wm.WeightModule(alg, hw, (2, 1))
    g = mod.shapovalov_gram()
    for a, ia in enumerate(mod.basis):
        for b, ib in enumerate(mod.basis):
            if tuple(len(x) for x in ia) != tuple(len(x) for x in ib):
                assert g[a][b] == 0


def test_casimir_examples(sl2_like):
    alg, hw = sl2_like
    m0 = wm.WeightModule(alg, hw, (0,))
    assert m0.casimir(0, 1) == [[hw.lam_lam[0][1]]]
    mod = wm.WeightModule(alg, hw, (1,))
    a1 = hw.lam_alpha[0][0]
    a2 = hw.lam_alpha[1][0]
    L12 = hw.lam_lam[0][1]
    om = mod.casimir(0, 1)
    assert om == [[L12 - a2, a2], [a1, L12 - a1]]
    assert om == mod.casimir(1, 0)
    with pytest.raises(ValueError):
        mod.casimir(0, 0)


def test_casimir_commutes_with_h(rank2):
    alg, hw = rank2
    mod = wm.WeightModule(alg, hw, (1, 1))
    om = mod.casimir(0, 1)
    rng = random.Random(4)
    hvals = [F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(alg.rank)]
    diag = []
    for index in mod.basis:
        val = F(0)
        for j in (0, 1):
            deg = wm.group_degree(index[j], alg.rank)
            val += sum(-deg[k] * hvals[k] for k in range(alg.rank))
        diag.append(val)
    dmat = [[diag[i] if i == j else F(0) for j in range(mod.dim)] for i in range(mod.dim)]
    assert ratlin.is_zero_matrix(ratlin.commutator(om, dmat))


def test_nu_examples(sl2_like):
    alg, hw = sl2_like
    m0 = wm.WeightModule(alg, hw, (0,))
    assert m0.nu_image(((), ())) == []
    hw1 = wm.make_weights([[3]], [[1]])
    m1 = wm.WeightModule(alg, hw1, (1,))
    pieces = m1.nu_image(((0,),))
    assert len(pieces) == 1
    lie, vec = pieces[0]
    assert lie.degree == (1,) and vec == {((),): F(3)}
    # pairing check: S(nu(f v), f1 (x) v) = S(f v, f v)
    lower = wm.WeightModule(alg, hw1, (0,))
    lhs = m1.pair_nu_with(((0,),), (1,), 0, lower, ((),))
    assert lhs == m1.shapovalov_gram()[0][0]


def test_cd_lemma_small(rank2):
    alg, hw = rank2
    for lam in [(1, 0), (1, 1), (2, 0), (2, 1)]:
        assert wm.cd_lemma_check(alg, hw, lam)


def test_delta_examples(sl2_like):
    alg, hw = sl2_like
    mod = wm.WeightModule(alg, hw, (1,))
    a1, a2 = hw.lam_alpha[0][0], hw.lam_alpha[1][0]
    expect = [[a1, a2], [a1, a2]]
    assert mod.delta_plus((1,), "dual") == expect
    assert mod.delta_plus((1,), "quotient") == expect
    # alpha with alpha_1 > lambda_1: zero matrix
    assert ratlin.is_zero_matrix(mod.delta_minus((2,)))
    assert ratlin.is_zero_matrix(mod.delta_plus((2,)))
    m0 = wm.WeightModule(alg, hw, (0,))
    assert ratlin.is_zero_matrix(m0.delta_plus((1,)))


def test_delta_intertwining_and_methods(rank2):
    alg, hw = rank2
    rng = random.Random(11)
    for lam in [(1, 0), (1, 1), (2, 1)]:
        mod = wm.WeightModule(alg, hw, lam)
        gram = mod.shapovalov_gram()
        for alpha in mod._positive_degrees():
            dp = mod.delta_plus(alpha, "dual")
            dq = mod.delta_plus(alpha, "quotient")
            assert dp == dq, (lam, alpha)
            # S Delta_+ = -Delta_- S, in matrix form G D = D^T G
            assert ratlin.mat_mul(gram, dp) == \
                ratlin.mat_mul(ratlin.transpose(dp), gram)


def test_delta_methods_random_gram():
    rng = random.Random(23)
    for _ in range(3):
        b12 = F(rng.randint(1, 9), rng.randint(1, 5))
        alg = fl.make_algebra([[2, b12], [b12, F(rng.randint(3, 9), 2)]])
        hw = wm.make_weights(
            [[F(rng.randint(1, 9), 2), F(rng.randint(1, 9), 3)],
             [F(rng.randint(1, 9), 2), F(rng.randint(1, 9), 3)]],
            [[1, F(1, 2)], [F(1, 2), 2]])
        mod = wm.WeightModule(alg, hw, (1, 1))
        for alpha in mod._positive_degrees():
            assert mod.delta_plus(alpha, "dual") == mod.delta_plus(alpha, "quotient")
