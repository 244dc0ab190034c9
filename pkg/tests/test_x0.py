from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sl3whitehead.linalg import Matrix, is_regular_order_three
from sl3whitehead.x0 import (
    OMEGA_TOWER,
    DegenerateParametersError,
    a_formula,
    build_pair,
    commutator_discriminant_check,
    common_eigenvector,
    discriminant,
    eigenline_transversality,
    exchange_pattern,
    numeric_sample,
    solve_parameters,
    trace_map,
    verify_sigma,
)

J = OMEGA_TOWER.omega
ints = st.integers(-10, 10).map(Fraction)
zs = st.tuples(ints, ints, ints, ints)


def test_discriminant_examples():
    assert discriminant((5, 3, 5, 3)) == -375
    assert discriminant((3, 3, 3, 3)) == -135
    assert discriminant((1, 2, 3, 4)) == -204
    assert discriminant((-5, -4, 1, 5)) == 0


def test_solution_at_five_three():
    p = solve_parameters((5, 3, 5, 3))
    assert p.delta * p.delta == -375
    assert p.a == Fraction(-5, 16) + p.delta / 16
    A, B = build_pair(p)
    assert list(trace_map(A, B))[:8] == [0, 0, 5, 3, 0, 0, 5, 3]


def test_degenerate_denominator_is_named():
    with pytest.raises(DegenerateParametersError) as info:
        solve_parameters((0, 0, 0, -3))
    assert info.value.name == "j z1 + z2 + j^2 z3 + z4 + 3"


def test_explicit_delta_must_square_to_discriminant():
    with pytest.raises(ValueError):
        solve_parameters((5, 3, 5, 3), delta=OMEGA_TOWER(7))


def test_d_is_a_with_cube_roots_exchanged():
    p = solve_parameters((2, -1, 4, 3))
    z = tuple(p.tower.coerce(v) for v in (2, -1, 4, 3))
    j = p.tower.coerce(J)
    assert a_formula(z, p.delta, j) == p.a
    assert a_formula(z, -p.delta, j * j) == p.d


def test_zero_discriminant_sample_has_single_commutator_trace():
    report = commutator_discriminant_check((-5, -4, 1, 5))
    assert report.t_plus == report.t_minus == -14
    assert report.ok


def test_common_eigenvector():
    one = OMEGA_TOWER.one()
    D = Matrix.diagonal([one, J, J * J])
    U = Matrix([[1, 1, 2], [0, 1, 5], [0, 0, 1]], OMEGA_TOWER)
    E = U @ D @ U.inverse()
    assert common_eigenvector(D, E) is not None
    p = solve_parameters((5, 3, 5, 3))
    A, B = build_pair(p)
    assert common_eigenvector(A, B) is None
    assert eigenline_transversality(A, B)


@settings(max_examples=25, deadline=None)
@given(zs, st.sampled_from([1, -1]))
def test_parametrisation_round_trip(z, sign):
    try:
        p = solve_parameters(z, sign)
    except DegenerateParametersError:
        assume(False)
    A, B = build_pair(p)
    assert is_regular_order_three(A) and is_regular_order_three(B)
    assert list(trace_map(A, B))[:8] == [0, 0, z[0], z[1], 0, 0, z[2], z[3]]
    assert verify_sigma(p, z).ok
    assert exchange_pattern(p.a, p.b, p.c, p.d, p.j)


@settings(max_examples=10, deadline=None)
@given(zs)
def test_float_mode_agrees_with_exact(z):
    try:
        exact = solve_parameters(z, 1)
    except DegenerateParametersError:
        assume(False)
    approx = numeric_sample(z, 1)
    assert approx["sigma_ok"] and approx["commutator_ok"]
    assert abs(complex(exact.a) - complex(approx["a"])) < 1e-9 * max(1, abs(complex(exact.a)))
