from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl3whitehead.exactfield import (
    QQ,
    FieldElement,
    FieldTower,
    TowerMismatchError,
    ZeroDivisorError,
    adjoin_sqrt,
    complex_embed,
    rational_sqrt,
)

TOWER = FieldTower.from_squares([-1, 3, 5])
small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
elements = st.lists(small, min_size=8, max_size=8).map(TOWER.element)


def test_generators_square_to_their_levels():
    i, s3, s5 = TOWER.gens()
    assert i * i == -1
    assert s3 * s3 == 3
    assert s5 * s5 == 5
    assert str(s3 * s5) == "(1)·sqrt15"
    assert str(i * s3 * s5) == "(1)·i*sqrt15"


def test_reference_coordinates_multiply_to_one():
    i, s3, s5 = TOWER.gens()
    s15 = s3 * s5
    assert ((-3 - i * s15) / 4) * ((-3 + i * s15) / 6) == 1


def test_inverse_of_one_minus_coordinate():
    i, s3, s5 = TOWER.gens()
    z = (7 + i * s3 * s5) / 4
    assert 1 / (1 - z) == Fraction(-1, 2) + i * s3 * s5 / 6


def test_omega_is_a_primitive_cube_root():
    w = TOWER.omega
    assert w ** 3 == 1
    assert not w == 1
    assert 1 + w + w * w == 0


def test_omega_missing_raises():
    with pytest.raises(ValueError):
        FieldTower.from_squares([-1]).omega


def test_complex_embedding():
    i, s3, s5 = TOWER.gens()
    with mpmath.workdps(40):
        value = complex_embed((7 + i * s3 * s5) / 4, 30)
        assert abs(value - mpmath.mpc(1.75, mpmath.sqrt(15) / 4)) < mpmath.mpf(10) ** -25


def test_adjoin_perfect_square_stays_in_tower():
    tower, root = adjoin_sqrt(TOWER, TOWER(4))
    assert tower == TOWER
    assert root == 2


def test_adjoin_formal_root():
    base = FieldTower.from_squares([-1, 3])
    tower, delta = adjoin_sqrt(base, base(-375))
    assert tower.depth == 3
    assert delta * delta == -375
    assert base.embeds_in(tower)


def test_square_roots_found_inside_tower():
    i, s3, s5 = TOWER.gens()
    assert TOWER(-375).sqrt() == 5 * i * s3 * s5
    assert QQ(-375).sqrt() is None
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(2) is None


def test_zero_divisor_detected():
    # sqrt(4) adjoined formally over a tower where it already exists
    bad = FieldTower((QQ(-1), FieldTower.from_squares([-1])(-1)))
    r = bad.gen(1)
    i = bad.gen(0)
    with pytest.raises(ZeroDivisorError) as info:
        (r - i).inverse()
    assert info.value.level == 1


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        TOWER.one() / TOWER.zero()


def test_cross_tower_coercion():
    qi = FieldTower.from_squares([-1])
    x = qi.gen(0) + 1
    y = TOWER.gen(1)
    assert (x * y).tower == TOWER
    other = FieldTower.from_squares([2])
    with pytest.raises(TowerMismatchError):
        other.gen(0) + qi.gen(0)


def test_string_round_trip_and_json(K):
    i, s3, s5 = K.gens()
    x = (7 - i * s3 * s5) / 4 - s3 / 3
    assert K.parse(str(x)) == x
    assert FieldElement.from_json(x.to_json()) == x
    assert FieldTower.from_json(K.to_json()) == K


def test_rejects_rational_square_level():
    with pytest.raises(ValueError):
        FieldTower.from_squares([4])


@settings(max_examples=400, deadline=None)
@given(elements, elements, elements)
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    assert x * 1 == x


@settings(max_examples=400, deadline=None)
@given(elements)
def test_inverse_axiom(x):
    if x.is_zero():
        return
    assert x * x.inverse() == 1
    assert (x.inverse()).inverse() == x


@settings(max_examples=300, deadline=None)
@given(elements, elements)
def test_table_and_recursive_products_agree(x, y):
    assert x * y == x.mul_recursive(y)


@settings(max_examples=200, deadline=None)
@given(elements, elements)
def test_embedding_is_a_ring_map(x, y):
    with mpmath.workdps(40):
        ex, ey, exy = complex_embed(x, 30), complex_embed(y, 30), complex_embed(x * y, 30)
        assert abs(ex * ey - exy) <= mpmath.mpf(10) ** -20 * max(1, abs(exy))
