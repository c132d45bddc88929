import random

import pytest

from src.errors import StringAlgebraError
from src.linalg import ExactField, Subspace


def vec(K, *values):
    return tuple(K(v) for v in values)


def test_parse_and_format():
    QQ = ExactField()
    assert QQ.format(QQ.parse("-3/4")) == "-3/4"
    assert QQ.format(QQ.parse("6/3")) == "2"
    GF5 = ExactField(5)
    assert GF5.format(GF5.parse("1/2")) == "3"
    assert GF5.name == "GF(5)"
    with pytest.raises(StringAlgebraError):
        GF5.parse("1/5")
    with pytest.raises(StringAlgebraError):
        QQ.parse("x/")


def test_lambda_values_skip_zero():
    GF2 = ExactField(2)
    assert [GF2.format(x) for x in GF2.lambda_values([1, 2, 3])] == ["1"]
    QQ = ExactField()
    assert [QQ.format(x) for x in QQ.lambda_values([1, 2])] == ["1", "2"]


def test_random_nonzero_is_seeded():
    QQ = ExactField()
    first = [QQ.random_nonzero(random.Random(7)) for _ in range(5)]
    second = [QQ.random_nonzero(random.Random(7)) for _ in range(5)]
    assert first == second
    assert not any(QQ.is_zero(x) for x in first)


def test_solve_and_nullspace(QQ):
    rows = [vec(QQ, 1, 2, 3), vec(QQ, 0, 1, 1)]
    null = QQ.nullspace(rows, 3)
    assert len(null) == 1
    assert QQ.rank(rows, 3) == 2
    x = QQ.solve(rows, 3, vec(QQ, 6, 2))
    assert x is not None
    assert QQ.apply(QQ.matrix(rows, 2, 3), x) == vec(QQ, 6, 2)
    assert QQ.solve([vec(QQ, 1, 1), vec(QQ, 2, 2)], 2, vec(QQ, 1, 3)) is None


def test_subspace_lattice(QQ):
    x = Subspace.span(QQ, 3, [vec(QQ, 1, 0, 0), vec(QQ, 0, 1, 0)])
    y = Subspace.span(QQ, 3, [vec(QQ, 0, 1, 0), vec(QQ, 0, 0, 1)])
    assert (x & y).dim == 1
    assert (x & y).contains(vec(QQ, 0, 5, 0))
    assert (x + y).is_full()
    assert (x & y) <= x
    assert not x <= y
    assert Subspace.zero(QQ, 3).is_zero()


def test_image_and_preimage(QQ):
    # projection onto the first coordinate of K^2
    A = QQ.matrix([vec(QQ, 1, 0)], 1, 2)
    full = Subspace.full(QQ, 2)
    assert full.image(A).is_full()
    kernel = Subspace.zero(QQ, 1).preimage(A)
    assert kernel.dim == 1
    assert kernel.contains(vec(QQ, 0, 1))
    assert not kernel.contains(vec(QQ, 1, 0))


def test_decompose(QQ):
    x = Subspace.span(QQ, 2, [vec(QQ, 1, 0)])
    y = Subspace.span(QQ, 2, [vec(QQ, 1, 1)])
    s, t = x.decompose(y, vec(QQ, 3, 1))
    assert s == vec(QQ, 2, 0)
    assert t == vec(QQ, 1, 1)
    assert x.decompose(x, vec(QQ, 0, 1)) is None


def test_coordinates(QQ):
    x = Subspace.span(QQ, 3, [vec(QQ, 1, 0, 1), vec(QQ, 0, 1, 0)])
    assert x.coordinates(vec(QQ, 2, 3, 2)) == vec(QQ, 2, 3)
    assert x.coordinates(vec(QQ, 0, 0, 1)) is None


def test_prime_field_arithmetic():
    GF3 = ExactField(3)
    rows = [vec(GF3, 1, 1), vec(GF3, 1, 2)]
    assert GF3.rank(rows, 2) == 2
    assert GF3.rank([vec(GF3, 1, 1), vec(GF3, 2, 2)], 2) == 1
    x = GF3.solve(rows, 2, vec(GF3, 0, 1))
    assert GF3.apply(GF3.matrix(rows, 2, 2), x) == vec(GF3, 0, 1)


def test_empty_shapes(QQ):
    zero = QQ.matrix([], 0, 2)
    assert QQ.apply(zero, vec(QQ, 1, 1)) == ()
    assert Subspace.full(QQ, 0).image(QQ.matrix([], 2, 0)).is_zero()
    assert QQ.matmul(QQ.zeros(2, 0), QQ.zeros(0, 3)).shape == (2, 3)
