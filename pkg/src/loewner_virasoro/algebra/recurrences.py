"""Polynomial recurrences on the coefficient body and the Kirillov basis change."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .fields import OneForm, VectorFieldOnM, kirillov_field
from .polynomial import CoeffPolynomial


def p_polynomials(n: int) -> list[CoeffPolynomial]:
    """``P_0..P_n`` with ``P_k = -sum_{j=1}^k (j+1) c_j P_{k-j}``.

    ``P_k`` is the ``z^k`` coefficient of ``1/f'(z)``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    ring = max(n, 1)
    c = [None] + [CoeffPolynomial.variable(k, ring) for k in range(1, ring + 1)]
    P = [CoeffPolynomial.constant(1, ring)]
    for k in range(1, n + 1):
        acc = CoeffPolynomial.zero(ring)
        for j in range(1, k + 1):
            acc = acc + c[j] * P[k - j] * (j + 1)
        P.append(-acc)
    return P


def kirillov_action_on_P(k: int, m: int, n: int | None = None) -> CoeffPolynomial:
    """``L_k P_m``; equals ``(m-2k-1) P_{m-k}`` for ``m >= k`` and 0 otherwise."""
    if k < 1 or m < 0:
        raise ValueError("need k >= 1 and m >= 0")
    n = max(k, m, 1) if n is None else n
    P = p_polynomials(n)
    return kirillov_field(k, n).apply(P[m])


def pi_expansion(n: int) -> tuple[list[CoeffPolynomial], list[CoeffPolynomial]]:
    """``(K_1..K_n, Pi_1..Pi_n)`` so that ``L_0 = sum_m Pi_m L_m``.

    ``K_m = -sum_{j=1}^{m-1} j (m-j+1) c_{m-j} c_j`` and
    ``Pi_m = m c_m + sum_{j=1}^m K_{m-j+1} P_{j-1}``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c = [None] + [CoeffPolynomial.variable(k, n) for k in range(1, n + 1)]
    P = p_polynomials(n)
    K = [None]
    for m in range(1, n + 1):
        acc = CoeffPolynomial.zero(n)
        for j in range(1, m):
            acc = acc + c[m - j] * c[j] * (j * (m - j + 1))
        K.append(-acc)
    Pi = []
    for m in range(1, n + 1):
        acc = c[m] * m
        for j in range(1, m + 1):
            acc = acc + K[m - j + 1] * P[j - 1]
        Pi.append(acc)
    return K[1:], Pi


def omega_forms(n: int) -> list[OneForm]:
    """``omega_1..omega_n`` from ``omega_k = dc_k - sum_{j<k} (j+1) c_j omega_{k-j}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = [None] + [CoeffPolynomial.variable(k, n) for k in range(1, n + 1)]
    om: list[OneForm] = []
    for k in range(1, n + 1):
        form = OneForm.basis(k, n)
        for j in range(1, k):
            form = form - om[k - j - 1] * (c[j] * (j + 1))
        om.append(form)
    return om


def omega_forms_closed(n: int) -> list[OneForm]:
    """``omega_k = dc_k + sum_{j=1}^{k-1} P_j dc_{k-j}``."""
    P = p_polynomials(n)
    out = []
    for k in range(1, n + 1):
        form = OneForm.basis(k, n)
        for j in range(1, k):
            form = form + OneForm.basis(k - j, n) * P[j]
        out.append(form)
    return out


def duality_matrix(n: int, forms: Sequence[OneForm] | None = None) -> list[list[CoeffPolynomial]]:
    """``M[k][m] = omega_{k+1}(L_{m+1})``; the identity when the forms are dual."""
    forms = omega_forms(n) if forms is None else forms
    fields = [kirillov_field(m, n) for m in range(1, n + 1)]
    return [[w.pair(L) for L in fields] for w in forms]


def l0_field(n: int) -> VectorFieldOnM:
    """``L_0 f = z f' - f`` on coefficients: component ``k c_k`` at slot ``k``."""
    return VectorFieldOnM(tuple(CoeffPolynomial.variable(k, n) * k for k in range(1, n + 1)))


def l0_from_pi(n: int) -> VectorFieldOnM:
    """``sum_m Pi_m L_m`` assembled from the recurrences."""
    _, Pi = pi_expansion(n)
    total = VectorFieldOnM(tuple(CoeffPolynomial.zero(n) for _ in range(n)))
    for m in range(1, n + 1):
        L = kirillov_field(m, n)
        total = total + VectorFieldOnM(tuple(Pi[m - 1] * comp for comp in L.components))
    return total


# --------------------------------------------------------------------------
# numeric basis change between affine velocities and Kirillov coordinates


def p_values(c: Sequence[complex]) -> np.ndarray:
    """Numeric ``P_0..P_n`` at the point ``c`` (coefficients of ``1/f'``)."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    P = np.zeros(n + 1, dtype=complex)
    P[0] = 1.0
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        P[k] = -np.sum((j + 1) * c[j - 1] * P[k - j])
    return P


def u_from_cdot(cdot: Sequence[complex], c: Sequence[complex]) -> np.ndarray:
    """Kirillov-basis velocity ``u_k = cdot_k + sum_{j=1}^{k-1} P_j(c) cdot_{k-j}``."""
    cdot = np.asarray(cdot, dtype=complex)
    c = np.asarray(c, dtype=complex)
    if cdot.shape != c.shape:
        raise ValueError("cdot and c must have equal length")
    P = p_values(c)
    n = len(c)
    u = np.empty(n, dtype=complex)
    for k in range(1, n + 1):
        j = np.arange(1, k)
        u[k - 1] = cdot[k - 1] + np.sum(P[j] * cdot[k - j - 1])
    return u


def u_from_cdot_recursive(cdot: Sequence[complex], c: Sequence[complex]) -> np.ndarray:
    """Same map via ``u_k = cdot_k - sum_{j=1}^{k-1} (j+1) c_j u_{k-j}``."""
    cdot = np.asarray(cdot, dtype=complex)
    c = np.asarray(c, dtype=complex)
    n = len(c)
    u = np.empty(n, dtype=complex)
    for k in range(1, n + 1):
        acc = cdot[k - 1]
        for j in range(1, k):
            acc -= (j + 1) * c[j - 1] * u[k - j - 1]
        u[k - 1] = acc
    return u


def cdot_from_u(u: Sequence[complex], c: Sequence[complex]) -> np.ndarray:
    """Affine velocity of ``sum_k u_k L_k`` at ``c``: ``cdot_s = u_s + sum_{k<s} u_k (s-k+1) c_{s-k}``."""
    u = np.asarray(u, dtype=complex)
    c = np.asarray(c, dtype=complex)
    if u.shape != c.shape:
        raise ValueError("u and c must have equal length")
    n = len(c)
    out = u.copy()
    for s in range(2, n + 1):
        k = np.arange(1, s)
        out[s - 1] += np.sum(u[k - 1] * (s - k + 1) * c[s - k - 1])
    return out
