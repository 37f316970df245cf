from fractions import Fraction

import numpy as np
import pytest

from loewner_virasoro.algebra import CoeffPolynomial
from loewner_virasoro.evolution import BlowUpError
from loewner_virasoro.geodesics import (
    CotangentState,
    conjugated_momentum_system,
    constant_u_geodesic,
    constant_u_numeric,
    energy,
    energy_rate_polynomial,
    geodesic_polynomials,
    geodesic_ring_names,
    hamiltonian_rhs,
    integrate_geodesic,
    integrate_u_flow,
    lagrangian,
    momenta_from_state,
    pair_contributions,
    state_from_momenta,
    substitute_geodesic,
    u_flow_rhs,
    velocity_system,
)


def rand(rng, n, scale=1.0):
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def test_momenta_round_trip():
    rng = np.random.default_rng(0)
    c, l = rand(rng, 6, 0.3), rand(rng, 6)
    s = state_from_momenta(l, c)
    assert np.allclose(momenta_from_state(s), l)


def test_energy_and_lagrangian():
    u = np.array([1, 1j, 2])
    assert energy(u) == 6.0
    assert lagrangian(u) == 3.0


def test_energy_rate_vanishes_identically():
    for n in (2, 5, 8):
        assert energy_rate_polynomial(n).is_zero()


def test_pairwise_cancellation():
    for key, poly in pair_contributions(6).items():
        assert poly.is_zero(), key


def test_conjugated_momentum_system_is_velocity_system():
    for n in (3, 6):
        assert conjugated_momentum_system(n) == velocity_system(n)


def test_u_flow_energy_conserved_rhs():
    rng = np.random.default_rng(2)
    u = rand(rng, 8)
    assert abs(np.vdot(u, u_flow_rhs(u)).real) < 1e-12


def test_u_flow_energy_drift():
    rng = np.random.default_rng(5)
    u0 = rand(rng, 8)
    _, us = integrate_u_flow(u0, 2.0, 1e-3, record_every=100)
    E = np.sum(np.abs(us) ** 2, axis=1)
    assert np.max(np.abs(E - E[0])) <= 1e-10 * E[0]


def test_hamiltonian_velocity_is_conj_momenta():
    rng = np.random.default_rng(7)
    c = rand(rng, 5, 0.2)
    s = state_from_momenta(rand(rng, 5), c)
    tr = integrate_geodesic(s, 1.0, 1e-3, record_every=100)
    l_end = momenta_from_state(CotangentState(tr.c[-1], tr.psibar[-1]))
    assert np.allclose(np.conj(l_end), tr.u[-1], atol=1e-8)
    assert np.allclose(tr.energies(), tr.energies()[0], rtol=1e-9)


def test_top_momentum_constant():
    rng = np.random.default_rng(9)
    s = state_from_momenta(rand(rng, 4), rand(rng, 4, 0.2))
    _, psidot = hamiltonian_rhs(s)
    assert psidot[-1] == 0
    _, psidot = hamiltonian_rhs(s, "printed")
    assert psidot[-1] == 0


def test_printed_variant_departs_from_velocity_flow():
    rng = np.random.default_rng(11)
    s = state_from_momenta(rand(rng, 6), rand(rng, 6, 0.3))
    a = integrate_geodesic(s, 0.2, 1e-3, "conjugate")
    b = integrate_geodesic(s, 0.2, 1e-3, "printed")
    lb = momenta_from_state(CotangentState(b.c[-1], b.psibar[-1]))
    assert np.max(np.abs(np.conj(lb) - b.u[-1])) > 1e-3
    assert np.max(np.abs(a.c[-1] - b.c[-1])) > 1e-6


def test_printed_variant_blows_up():
    rng = np.random.default_rng(1)
    n = 8
    u0, c0 = rand(rng, n), rand(rng, n, 0.3)
    s = state_from_momenta(np.conj(u0), c0)
    with pytest.raises(BlowUpError):
        integrate_geodesic(s, 2.0, 1e-3, "printed")


def test_unknown_variant():
    with pytest.raises(ValueError):
        hamiltonian_rhs(CotangentState([0], [1]), "other")


# -- constant velocity -------------------------------------------------------------


def _ring(n):
    names = geodesic_ring_names(n)
    N = 2 * n + 1
    return [CoeffPolynomial.variable(i, N, names) for i in range(1, N + 1)]


def test_printed_lines_at_origin():
    n = 3
    polys = substitute_geodesic(geodesic_polynomials(n), c0=[0] * n)
    s, v1, v2, v3 = _ring(n)[:4]
    assert polys[0] == s * v1
    assert polys[1] == s * v2 + s * s * v1 * v1
    assert polys[2] == s * v3 + s * s * v1 * v2 * Fraction(5, 2) + s**3 * v1**3


def test_degrees_in_s():
    polys = geodesic_polynomials(6)
    assert [p.degree(1) for p in polys] == [1, 2, 3, 4, 5, 6]


def test_symbolic_matches_numeric():
    rng = np.random.default_rng(2024)
    n = 6
    u0, c0 = rand(rng, n), rand(rng, n, 0.3)
    sym = constant_u_geodesic(c0, u0, 1.0)
    num = constant_u_numeric(c0, u0, 1.0, 1e-3)
    assert np.max(np.abs(sym - num)) < 1e-8


def test_exact_substitution_keeps_s_free():
    polys = substitute_geodesic(geodesic_polynomials(2), c0=[Fraction(1, 2), 0], u0=[1, 1j])
    assert all(p.variables() <= {1} for p in polys)
    assert polys[0].evaluate([2] + [0] * 4) == 0.5 + 2
