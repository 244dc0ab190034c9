import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sl3whitehead.exactfield import FieldTower
from sl3whitehead.linalg import (
    DimensionError,
    Matrix,
    SingularMatrixError,
    char_poly_3,
    is_regular_order_three,
    is_regular_unipotent,
    kernel_basis,
    parallel,
    projectively_equal,
    rank,
    rref,
)

K = FieldTower.from_squares([-1, 3, 5])
I, S3, S5 = K.gens()
SQ = {"i": sympy.I, "sqrt3": sympy.sqrt(3), "sqrt5": sympy.sqrt(5)}


def to_sympy(x):
    total = 0
    for mask, c in enumerate(x.coeffs):
        if c:
            term = sympy.Rational(c.numerator, c.denominator)
            for k, name in enumerate(("i", "sqrt3", "sqrt5")):
                if mask >> k & 1:
                    term *= SQ[name]
            total += term
    return total


def random_element(rng, density=1.0):
    return K.element([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if rng.random() < density else 0
                      for _ in range(8)])


def random_matrix(rng, rows, cols, density=1.0):
    return Matrix([[random_element(rng, density) for _ in range(cols)] for _ in range(rows)], K)


S = Matrix([[1, (S3 - I * S5) / 2, -1], [(-S3 - I * S5) / 2, -1, 0], [-1, 0, 0]])


def test_determinant_against_sympy():
    rng = random.Random(3)
    for n in (2, 3, 4):
        m = random_matrix(rng, n, n, 0.5)
        oracle = sympy.Matrix([[to_sympy(x) for x in row] for row in m.entries]).det()
        assert sympy.simplify(sympy.expand(oracle - to_sympy(m.det()))) == 0


def test_inverse_and_adjugate():
    rng = random.Random(5)
    for n in (2, 3, 5):
        m = random_matrix(rng, n, n)
        assert m @ m.inverse() == Matrix.identity(n, K)


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        Matrix([[1, 2], [2, 4]]).inverse()


def test_shape_errors():
    with pytest.raises(DimensionError):
        Matrix([[1, 2]]) @ Matrix([[1, 2]])
    with pytest.raises(DimensionError):
        Matrix([[1, 2], [3]])


def test_order_three_and_char_poly():
    assert S.det() == 1
    assert char_poly_3(S) == (0, 0)
    assert is_regular_order_three(S)
    assert not is_regular_order_three(Matrix.identity(3, K))


def test_regular_unipotent():
    assert is_regular_unipotent(Matrix([[1, 1, 0], [0, 1, 1], [0, 0, 1]]))
    assert not is_regular_unipotent(Matrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]]))
    assert not is_regular_unipotent(Matrix.identity(3))


def test_projective_equality():
    w = K.omega
    assert projectively_equal(S, S * w)
    assert projectively_equal(S, S * (w * w))
    assert not projectively_equal(S, S * 2)
    m = Matrix([[1, 2], [0, 1]])
    assert projectively_equal(m, -m)


def test_kernel_is_echelon_and_annihilated():
    m = Matrix([[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 1, 0]])
    basis = kernel_basis(m)
    assert len(basis) == 2
    for v in basis:
        assert all(x.is_zero() for x in m.apply(v))
    lead = [next(k for k, x in enumerate(v) if not x.is_zero()) for v in basis]
    assert lead == sorted(lead)
    assert all(basis[n][lead[n]] == 1 for n in range(2))


def test_rref_pivots():
    rows, pivots = rref(Matrix([[0, 2, 4], [1, 1, 1]]))
    assert pivots == [0, 1]
    assert rows[0][0] == 1 and rows[1][1] == 1


def test_parallel():
    assert parallel((K(1), I, K(0)), (I, K(-1), K(0)))
    assert not parallel((K(1), K(0)), (K(0), K(1)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6), st.floats(0.2, 1.0))
def test_rank_nullity(seed, rows, cols, density):
    rng = random.Random(seed)
    m = random_matrix(rng, rows, cols, density)
    # duplicate a row sometimes so rank deficiency actually happens
    if rows > 1 and rng.random() < 0.5:
        entries = list(m.entries)
        entries[-1] = tuple(x * 3 for x in entries[0])
        m = Matrix(entries, K)
    assert rank(m) + len(kernel_basis(m)) == cols
    assert rank(m) == rank(m.transpose())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_cayley_hamilton(seed):
    rng = random.Random(seed)
    m = random_matrix(rng, 3, 3, 0.6)
    tr = m.trace()
    minors = m.adjugate().trace()
    det = m.det()
    one = Matrix.identity(3, K)
    value = m @ m @ m - m @ m * tr + m * minors - one * det
    assert value.is_zero()
