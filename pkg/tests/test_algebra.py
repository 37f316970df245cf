from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewner_virasoro.algebra import (
    QI,
    CoeffPolynomial,
    CovariantFunctional,
    OneForm,
    cdot_from_u,
    commutator,
    duality_matrix,
    kirillov_action_on_P,
    kirillov_field,
    l0_field,
    l0_from_pi,
    lie_bracket,
    omega_forms,
    omega_forms_closed,
    p_polynomials,
    p_values,
    poisson_bracket,
    u_from_cdot,
    u_from_cdot_recursive,
)
from loewner_virasoro.series import TruncatedTaylor, reciprocal

N = 3
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
gauss = st.builds(QI, rationals, rationals)
monos = st.tuples(*[st.integers(0, 2)] * N)
polys = st.dictionaries(monos, gauss, max_size=4).map(lambda t: CoeffPolynomial(t, N))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_polynomial_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_product_rule(a, b):
    for k in range(1, N + 1):
        assert (a * b).diff(k) == a.diff(k) * b + a * b.diff(k)


@settings(max_examples=60, deadline=None)
@given(gauss, gauss)
def test_gaussian_rationals_field(x, y):
    assert x * y == y * x
    if y != 0:
        assert (x / y) * y == x
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


def test_qi_compares_with_plain_numbers():
    assert QI(Fraction(1, 2)) == Fraction(1, 2)
    assert QI(3) == 3
    assert QI(1, 1) != 1
    assert QI(0) == 0


def test_polynomial_accepts_float_scalars_exactly():
    c1 = CoeffPolynomial.variable(1, 1)
    assert c1 * 0.5 == c1 / 2
    assert (c1 * 1j).evaluate([2]) == 2j


def test_polynomial_string_is_canonical():
    c = [CoeffPolynomial.variable(k, 3) for k in (1, 2, 3)]
    p = c[2] * 5 - c[0] * c[1] * 6 + c[0] ** 3 * 2
    assert str(p) == "2*c1^3 - 6*c1*c2 + 5*c3"


def test_kirillov_field_shape():
    L1 = kirillov_field(1, 4)
    assert L1[1] == 1
    assert L1[2] == CoeffPolynomial.variable(1, 4) * 2
    assert L1[4] == CoeffPolynomial.variable(3, 4) * 4
    with pytest.raises(ValueError):
        kirillov_field(5, 4)


@pytest.mark.parametrize("m,k", [(1, 2), (1, 3), (2, 3), (1, 5), (2, 4)])
def test_witt_relation(m, k):
    n = 8
    br = lie_bracket(kirillov_field(m, n), kirillov_field(k, n))
    target = kirillov_field(m + k, n).scale(k - m)
    assert br.equal_on_trusted(target)
    assert br.trusted >= n - max(m, k)


def test_commutator_is_opposite_bracket():
    n = 6
    A, B = kirillov_field(1, n), kirillov_field(2, n)
    assert commutator(A, B).equal_on_trusted(lie_bracket(A, B).scale(-1))


def test_jacobi_identity():
    n = 8
    L = [None] + [kirillov_field(j, n) for j in range(1, 4)]
    a = lie_bracket(L[1], lie_bracket(L[2], L[3]))
    b = lie_bracket(L[2], lie_bracket(L[3], L[1]))
    c = lie_bracket(L[3], lie_bracket(L[1], L[2]))
    total = a + b + c
    assert total.is_zero(total.trusted)


def test_poisson_bracket_matches_vector_field_bracket():
    n = 6
    F = CovariantFunctional.dual_of(kirillov_field(1, n))
    G = CovariantFunctional.dual_of(kirillov_field(2, n))
    pb = poisson_bracket(F, G)
    assert pb.dual_field().equal_on_trusted(kirillov_field(3, n))


def test_p_polynomials_low_order():
    P = p_polynomials(3)
    c1, c2, c3 = (CoeffPolynomial.variable(k, 3) for k in (1, 2, 3))
    assert P[0] == 1
    assert P[1] == c1 * -2
    assert P[2] == c1 * c1 * 4 - c2 * 3


def test_p_polynomials_match_symbolic_reciprocal():
    n = 8
    c = [CoeffPolynomial.variable(k, n) for k in range(1, n + 1)]
    fp = TruncatedTaylor([CoeffPolynomial.constant(1, n)] + [c[j - 1] * (j + 1) for j in range(1, n + 1)])
    R = reciprocal(fp)
    P = p_polynomials(n)
    assert all(R[k] == P[k] for k in range(n + 1))


def test_lk_acts_on_p_by_shift():
    n = 7
    P = p_polynomials(n)
    for k in range(1, n + 1):
        for m in range(k, n + 1):
            assert kirillov_action_on_P(k, m, n) == P[m - k] * (m - 2 * k - 1)


def test_omega_duality_and_routes():
    n = 6
    om = omega_forms(n)
    assert all(a == b for a, b in zip(om, omega_forms_closed(n)))
    M = duality_matrix(n, om)
    for i in range(n):
        for j in range(n):
            assert M[i][j] == (1 if i == j else 0)
    assert om[0] == OneForm.basis(1, n)


def test_l0_expansion():
    n = 6
    a, b = l0_from_pi(n), l0_field(n)
    assert a.equal_on_trusted(b)
    assert a.trusted >= 1


def test_velocity_basis_maps_round_trip():
    rng = np.random.default_rng(3)
    c = 0.3 * (rng.standard_normal(6) + 1j * rng.standard_normal(6))
    u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    cdot = cdot_from_u(u, c)
    assert np.allclose(u_from_cdot(cdot, c), u)
    assert np.allclose(u_from_cdot_recursive(cdot, c), u)


def test_p_values_match_polynomials():
    c = [0.1 + 0.2j, -0.3, 0.05j]
    P = p_polynomials(3)
    assert np.allclose(p_values(c), [complex(P[k].evaluate(c)) for k in range(4)])
