from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewner_virasoro.algebra import CoeffPolynomial
from loewner_virasoro.series import (
    LaurentWindow,
    TruncatedTaylor,
    compose,
    derivative,
    laurent_mul,
    reciprocal,
)

small = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def series(order):
    return st.lists(small, min_size=order + 1, max_size=order + 1).map(lambda c: TruncatedTaylor(np.array(c)))


def close(a, b, tol=1e-9):
    return np.allclose(np.asarray(a.coeffs, dtype=complex), np.asarray(b.coeffs, dtype=complex), atol=tol)


def test_min_order_propagation():
    a = TruncatedTaylor([1, 2, 3, 4])
    b = TruncatedTaylor([1, 1])
    assert (a + b).order == 1
    assert (a * b).order == 1
    assert derivative(a).order == 2
    assert a.shift(2).order == 5


def test_out_of_order_access_raises():
    a = TruncatedTaylor([1, 2])
    with pytest.raises(IndexError):
        a[2]
    with pytest.raises(IndexError):
        a[-1]


def test_geometric_reciprocal():
    inv = reciprocal(TruncatedTaylor([1, -1, 0, 0, 0, 0]))
    assert np.allclose(inv.coeffs, np.ones(6))


def test_reciprocal_rejects_zero_constant():
    with pytest.raises(ZeroDivisionError):
        reciprocal(TruncatedTaylor([0, 1]))


def test_compose_requires_vanishing_inner():
    with pytest.raises(ValueError):
        compose(TruncatedTaylor([1, 1]), TruncatedTaylor([1, 1]))


def test_compose_koebe_inverse():
    # k(z) = z/(1-z)^2 and its inverse series k^{-1}(w) compose to the identity
    n = 8
    k = TruncatedTaylor(np.array([0] + [j for j in range(1, n + 1)], dtype=complex))
    inv = TruncatedTaylor.identity(n)
    for _ in range(n):  # fixed-point iteration w = z - (k(w) - w)
        inv = TruncatedTaylor.identity(n) - (compose(k, inv) - inv)
    assert close(compose(k, inv), TruncatedTaylor.identity(n), 1e-12)


@settings(max_examples=40, deadline=None)
@given(series(6), series(6), series(6))
def test_ring_axioms_numeric(a, b, c):
    assert close(a * (b + c), a * b + a * c)
    assert close((a * b) * c, a * (b * c))
    assert close(a * b, b * a)


@settings(max_examples=40, deadline=None)
@given(series(6))
def test_reciprocal_is_inverse(a):
    a = TruncatedTaylor(np.concatenate(([1.0 + 0j], a.coeffs[1:])))
    assert close(a * reciprocal(a), TruncatedTaylor.constant(1, 6), 1e-8)


@settings(max_examples=30, deadline=None)
@given(series(5), series(5), series(5))
def test_compose_associative(a, b, c):
    b = TruncatedTaylor(np.concatenate(([0j], b.coeffs[1:] * 0.5)))
    c = TruncatedTaylor(np.concatenate(([0j], c.coeffs[1:] * 0.5)))
    assert close(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-8)


@settings(max_examples=30, deadline=None)
@given(series(6), series(6))
def test_leibniz(a, b):
    assert close(derivative(a * b), derivative(a) * b.truncate(5) + a.truncate(5) * derivative(b))


def test_symbolic_coefficients_exact():
    c1 = CoeffPolynomial.variable(1, 2)
    c2 = CoeffPolynomial.variable(2, 2)
    one = CoeffPolynomial.constant(1, 2)
    fp = TruncatedTaylor([one, c1 * 2, c2 * 3])
    R = reciprocal(fp)
    assert R[1] == c1 * -2
    assert R[2] == c1 * c1 * 4 - c2 * 3


def test_exact_rational_coefficients():
    a = TruncatedTaylor([Fraction(1), Fraction(1, 3)])
    assert (a * a)[1] == Fraction(2, 3)


def test_laurent_product_validity():
    # z^{-1} times an order-3 Taylor series: z^{-1}..z^2 exact, z^3 unknown
    a = LaurentWindow.from_mapping({-1: 1}, 4)
    b = LaurentWindow.from_taylor(TruncatedTaylor([1, 2, 3, 4]), 4)
    p = laurent_mul(a, b)
    assert p.valid == (-1, 2)
    assert [p[k] for k in range(-1, 3)] == [1, 2, 3, 4]
    assert not p.is_valid(3)
