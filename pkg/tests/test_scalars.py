import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtwist.scalars import (
    ConfigError, CycScalar, det_int, field, half_exponent, inverse_mod, matmul_mod,
    q_factorial, smith_normal_form, solve_mod_l, span_mod,
)


@pytest.mark.parametrize("a,l,expected", [(1, 3, 2), (1, 5, 3), (0, 3, 0)])
def test_half_exponent_examples(a, l, expected):
    assert half_exponent(a, l) == expected


def test_half_exponent_rejects_even_l():
    with pytest.raises(ConfigError):
        half_exponent(1, 4)


def test_q_factorial_examples():
    F3, F5 = field(3), field(5)
    assert q_factorial(0, 3) == F3.one
    assert q_factorial(2, 3) == F3.from_int(-1)
    assert q_factorial(2, 5) == F5.q(1) + F5.q(4)


def test_q_factorial_vanishing_order_raises():
    with pytest.raises(ValueError):
        q_factorial(3, 3)


def test_cyclotomic_relation():
    for l in (3, 5, 7):
        F = field(l)
        total = F.zero
        for k in range(l):
            total = total + F.q(k)
        assert total.is_zero()
        assert F.q(1) ** l == F.one
        assert F.q(1) != F.one


def test_serialization_round_trip():
    F = field(5)
    x = F.q(2) * F.from_rational("3/7") - F.q(3)
    assert CycScalar.from_json(F, x.to_json()) == x


def test_power_of_q_detection():
    F = field(5)
    assert F.q(3).power_of_q() == 3
    assert (F.q(3) + F.one).power_of_q() is None


def _brute_kernel(A, l):
    n = len(A[0])
    return {v for v in itertools.product(range(l), repeat=n)
            if all(sum(a * x for a, x in zip(row, v)) % l == 0 for row in A)}


@pytest.mark.parametrize("A,l", [
    ([[2, 2], [2, 2]], 3),
    ([[2, -1], [-1, 2]], 3),
    ([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], 3),
    ([[0]], 3),
    ([[1, 0], [0, 1]], 5),
])
def test_solve_mod_l_kernel_matches_brute_force(A, l):
    x, kernel = solve_mod_l(A, [0] * len(A), l)
    assert x is not None
    assert span_mod(kernel, l, len(A[0])) == _brute_kernel(A, l)


def test_solve_mod_l_a2_cartan_kernel():
    _, kernel = solve_mod_l([[2, 2], [2, 2]], [0, 0], 3)
    assert span_mod(kernel, 3, 2) == span_mod([(1, 2)], 3, 2)


def test_solve_mod_l_identity_and_inconsistent():
    x, kernel = solve_mod_l([[1, 0], [0, 1]], [2, 1], 3)
    assert x == [2, 1] and kernel == []
    x, _ = solve_mod_l([[0]], [1], 3)
    assert x is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=3))
def test_smith_normal_form_is_a_factorization(A):
    U, D, V = smith_normal_form(A)
    m, n = len(A), 3
    assert [[sum(U[i][k] * sum(A[k][j] * V[j][c] for j in range(n)) for k in range(m)) for c in range(n)]
            for i in range(m)] == D
    assert all(D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
    assert abs(det_int(U)) == 1 and abs(det_int(V)) == 1
    diag = [abs(D[i][i]) for i in range(min(m, n))]
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_inverse_mod_is_inverse(entries):
    A = [entries[:2], entries[2:]]
    if (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % 5 == 0:
        with pytest.raises(ValueError):
            inverse_mod(A, 5)
        return
    assert matmul_mod(A, inverse_mod(A, 5), 5) == [[1, 0], [0, 1]]


def _cyc(l):
    F = field(l)
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    return st.lists(coeff, min_size=l, max_size=l).map(
        lambda cs: sum((F.q(k) * F.from_rational(c) for k, c in enumerate(cs)), F.zero))


@settings(max_examples=50, deadline=None)
@given(_cyc(5), _cyc(5), _cyc(5))
def test_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == x.F.zero
    if not x.is_zero():
        assert x * x.inverse() == x.F.one
        assert (y / x) * x == y
