from fractions import Fraction as F

import pytest

from kzd import ratlin


def test_rref_rank_nullspace():
    a = [[F(1), F(2), F(3)], [F(2), F(4), F(6)], [F(1), F(0), F(1)]]
    assert ratlin.rank(a) == 2
    ns = ratlin.nullspace(a)
    assert len(ns) == 1
    for row in a:
        assert sum(x * y for x, y in zip(row, ns[0])) == 0


def test_solve_and_inverse():
    a = [[F(2), F(1)], [F(1), F(3)]]
    x = ratlin.solve(a, [F(5), F(10)])
    assert ratlin.mat_vec(a, x) == [F(5), F(10)]
    inv = ratlin.inverse(a)
    assert ratlin.mat_mul(a, inv) == ratlin.identity(2)
    with pytest.raises(ValueError):
        ratlin.inverse([[F(1), F(2)], [F(2), F(4)]])


def test_int_row_reducer():
    red = ratlin.IntRowReducer(3)
    assert red.add([1, 2, 3])
    assert red.add([0, 1, 1])
    assert not red.add([1, 3, 4])
    assert red.add([0, 0, 5])
    assert red.rank == 3
