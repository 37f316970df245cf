"""Geodesic flow on the coefficient body for the metric ``sum_k |L_k|^2``.

A cotangent state is ``(c, psibar)``.  The momenta in the Kirillov basis are
``l_k = psibar_k + sum_{j=1}^{n-k} (j+1) c_j psibar_{k+j}`` and the velocity
in the same basis is ``u = conj(l)``.  With ``H = sum_k l_k conj(l_k)``:

* ``dc/dt = sum_k conj(l_k) L_k(c)``,
* ``dpsibar_p/dt = -(p+1) sum_{k=1}^{n-p} conj(l_k) psibar_{k+p}``,
* ``du_k/dt = sum_{j=1}^{n-k} (j-k) conj(u_j) u_{j+k}`` (decoupled).

``hamiltonian_rhs(..., variant="printed")`` uses ``l_k`` instead of
``conj(l_k)`` in the momentum equation; that variant does not keep
``u = conj(l)`` and is only provided for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import CoeffPolynomial, cdot_from_u, exact
from .evolution.flow import BLOWUP_BOUND, BlowUpError, _step_grid, rk4

VARIANTS = ("conjugate", "printed")


@dataclass(frozen=True)
class CotangentState:
    c: np.ndarray
    psibar: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        p = np.asarray(self.psibar, dtype=complex)
        if c.shape != p.shape or c.ndim != 1:
            raise ValueError("c and psibar must be 1-d sequences of equal length")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "psibar", p)

    @property
    def n(self) -> int:
        return len(self.c)


def momenta_from_state(s: CotangentState) -> np.ndarray:
    """``l_k = psibar_k + sum_{j=1}^{n-k} (j+1) c_j psibar_{k+j}``."""
    n = s.n
    l = s.psibar.copy()
    for k in range(1, n):
        j = np.arange(1, n - k + 1)
        l[k - 1] += np.sum((j + 1) * s.c[j - 1] * s.psibar[k + j - 1])
    return l


def state_from_momenta(l: Sequence[complex], c: Sequence[complex]) -> CotangentState:
    """Invert the triangular map from the top index down."""
    l = np.asarray(l, dtype=complex)
    c = np.asarray(c, dtype=complex)
    n = len(l)
    psi = np.zeros(n, dtype=complex)
    for k in range(n, 0, -1):
        j = np.arange(1, n - k + 1)
        psi[k - 1] = l[k - 1] - np.sum((j + 1) * c[j - 1] * psi[k + j - 1])
    return CotangentState(c, psi)


def hamiltonian_rhs(s: CotangentState, variant: str = "conjugate") -> tuple[np.ndarray, np.ndarray]:
    """``(dc/dt, dpsibar/dt)``; ``dpsibar_n/dt = 0`` always."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    n = s.n
    l = momenta_from_state(s)
    lbar = np.conj(l)
    cdot = cdot_from_u(lbar, s.c)
    weight = lbar if variant == "conjugate" else l
    psidot = np.zeros(n, dtype=complex)
    for p in range(1, n):
        k = np.arange(1, n - p + 1)
        psidot[p - 1] = -(p + 1) * np.sum(weight[k - 1] * s.psibar[k + p - 1])
    return cdot, psidot


def u_flow_rhs(u: Sequence[complex]) -> np.ndarray:
    """``du_k/dt = sum_{j=1}^{n-k} (j-k) conj(u_j) u_{j+k}``."""
    u = np.asarray(u, dtype=complex)
    n = len(u)
    ub = np.conj(u)
    out = np.zeros(n, dtype=complex)
    for k in range(1, n):
        j = np.arange(1, n - k + 1)
        out[k - 1] = np.sum((j - k) * ub[j - 1] * u[j + k - 1])
    return out


def energy(u: Sequence[complex]) -> float:
    """``sum_k |u_k|^2``, conserved along the velocity flow."""
    return float(np.sum(np.abs(np.asarray(u, dtype=complex)) ** 2))


def lagrangian(u: Sequence[complex]) -> float:
    """``1/2 sum_k |u_k|^2``."""
    return 0.5 * energy(u)


@dataclass
class GeodesicTrajectory:
    times: np.ndarray
    c: np.ndarray
    psibar: np.ndarray
    u: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.c.shape[1]

    def energies(self) -> np.ndarray:
        return np.sum(np.abs(self.u) ** 2, axis=1)

    def csv_header(self) -> list[str]:
        n = self.n
        cols = ["t"]
        for name in ("c", "psibar", "u"):
            cols += [f"{p}_{name}{k}" for k in range(1, n + 1) for p in ("re", "im")]
        return cols

    def csv_rows(self) -> list[list[float]]:
        rows = []
        for i, t in enumerate(self.times):
            row = [float(t)]
            for arr in (self.c, self.psibar, self.u):
                for v in arr[i]:
                    row += [v.real, v.imag]
            rows.append(row)
        return rows


def integrate_geodesic(
    s0: CotangentState,
    t_end: float,
    dt: float,
    variant: str = "conjugate",
    record_every: int = 1,
    bound: float = BLOWUP_BOUND,
) -> GeodesicTrajectory:
    """RK4 on the Hamiltonian system, with ``u`` propagated alongside by the velocity flow."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = s0.n
    u0 = np.conj(momenta_from_state(s0))

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        cd, pd = hamiltonian_rhs(CotangentState(y[:n], y[n : 2 * n]), variant)
        return np.concatenate((cd, pd, u_flow_rhs(y[2 * n :])))

    grid = _step_grid(0.0, t_end, dt, [])
    y = np.concatenate((s0.c, s0.psibar, u0))
    rec_t, rec_y = [0.0], [y]
    for i, (ta, tb) in enumerate(zip(grid, grid[1:]), start=1):
        y = rk4(rhs, y, ta, tb - ta)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y[:n])) > bound:
            raise BlowUpError(f"geodesic coefficients exceeded {bound:g} at t={tb:.6g}")
        if i % record_every == 0 or i == len(grid) - 1:
            rec_t.append(tb)
            rec_y.append(y)
    Y = np.array(rec_y)
    meta = {"n": n, "dt": dt, "t_end": t_end, "variant": variant}
    return GeodesicTrajectory(np.array(rec_t), Y[:, :n], Y[:, n : 2 * n], Y[:, 2 * n :], meta)


def integrate_u_flow(u0: Sequence[complex], t_end: float, dt: float, record_every: int = 1):
    """RK4 on the velocity flow alone; returns ``(times, u)``."""
    grid = _step_grid(0.0, t_end, dt, [])
    y = np.asarray(u0, dtype=complex)
    ts, us = [0.0], [y]
    f = lambda t, v: u_flow_rhs(v)  # noqa: E731
    for i, (ta, tb) in enumerate(zip(grid, grid[1:]), start=1):
        y = rk4(f, y, ta, tb - ta)
        if i % record_every == 0 or i == len(grid) - 1:
            ts.append(tb)
            us.append(y)
    return np.array(ts), np.array(us)


# --------------------------------------------------------------------------
# constant-velocity geodesics


def geodesic_ring_names(n: int) -> list[str]:
    """Variable names: ``s``, then ``v_k = conj(u_k(0))``, then ``a_k = c_k(0)``."""
    return ["s"] + [f"v{k}" for k in range(1, n + 1)] + [f"a{k}" for k in range(1, n + 1)]


def geodesic_polynomials(n: int) -> list[CoeffPolynomial]:
    """Symbolic ``c_1(s)..c_n(s)`` solving ``dc/ds = sum_k v_k L_k(c)`` from ``c(0) = a``.

    The system is triangular, so each ``c_m`` is an antiderivative in ``s``
    of a polynomial in the previously found ``c_1..c_{m-1}``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    names = geodesic_ring_names(n)
    N = 2 * n + 1
    var = lambda i: CoeffPolynomial.variable(i, N, names)  # noqa: E731
    v = [None] + [var(1 + k) for k in range(1, n + 1)]
    a = [None] + [var(1 + n + k) for k in range(1, n + 1)]
    c: list[CoeffPolynomial | None] = [None]
    for m in range(1, n + 1):
        rate = v[m]
        for k in range(1, m):
            rate = rate + v[k] * c[m - k] * (m - k + 1)
        c.append(a[m] + rate.integrate(1))
    return c[1:]


def substitute_geodesic(polys: Sequence[CoeffPolynomial], c0=None, u0=None) -> list[CoeffPolynomial]:
    """Specialize ``a`` to ``c0`` and/or ``v`` to ``conj(u0)`` exactly; ``s`` stays free."""
    n = len(polys)
    values: list = [None] * (2 * n + 1)
    if u0 is not None:
        values[1 : n + 1] = [exact(x).conjugate() for x in u0]
    if c0 is not None:
        values[n + 1 :] = [exact(x) for x in c0]
    out = []
    for p in polys:
        terms: dict = {}
        for mono, coef in p.terms.items():
            key = list(mono)
            for i, x in enumerate(values):
                if x is not None and mono[i]:
                    coef = coef * x ** mono[i]
                    key[i] = 0
            key = tuple(key)
            terms[key] = terms.get(key, 0) + coef
        out.append(CoeffPolynomial(terms, 2 * n + 1, p.names))
    return out


def constant_u_geodesic(c0: Sequence[complex], u0: Sequence[complex], s: float,
                        polys: Sequence[CoeffPolynomial] | None = None) -> np.ndarray:
    """Evaluate the polynomial constant-velocity geodesic at parameter ``s``."""
    c0 = np.asarray(c0, dtype=complex)
    u0 = np.asarray(u0, dtype=complex)
    n = len(c0)
    if len(u0) != n:
        raise ValueError("c0 and u0 must have equal length")
    polys = geodesic_polynomials(n) if polys is None else polys
    values = [s] + list(np.conj(u0)) + list(c0)
    return np.array([p.evaluate(values) for p in polys])


def constant_u_numeric(c0: Sequence[complex], u0: Sequence[complex], s: float, ds: float = 1e-3) -> np.ndarray:
    """RK4 oracle for ``dc/ds = sum_k conj(u_k(0)) L_k(c)``."""
    vb = np.conj(np.asarray(u0, dtype=complex))
    y = np.asarray(c0, dtype=complex)
    grid = _step_grid(0.0, s, ds, [])
    f = lambda t, c: cdot_from_u(vb, c)  # noqa: E731
    for ta, tb in zip(grid, grid[1:]):
        y = rk4(f, y, ta, tb - ta)
    return y


# --------------------------------------------------------------------------
# symbolic consistency of the momentum and velocity systems


def _pair_ring(n: int, plain: str, bar: str):
    names = [f"{plain}{k}" for k in range(1, n + 1)] + [f"{bar}{k}" for k in range(1, n + 1)]
    x = [None] + [CoeffPolynomial.variable(k, 2 * n, names) for k in range(1, n + 1)]
    y = [None] + [CoeffPolynomial.variable(n + k, 2 * n, names) for k in range(1, n + 1)]
    return x, y, names


def _quadratic_system(n: int, plain: str, bar: str) -> list[CoeffPolynomial]:
    x, y, _ = _pair_ring(n, plain, bar)
    out = []
    for k in range(1, n + 1):
        acc = CoeffPolynomial.zero(2 * n, x[1].names)
        for j in range(1, n - k + 1):
            acc = acc + y[j] * x[j + k] * (j - k)
        out.append(acc)
    return out


def momentum_system(n: int) -> list[CoeffPolynomial]:
    """``dl_k/dt = sum_{j=1}^{n-k} (j-k) conj(l_j) l_{j+k}`` in variables ``(l, lbar)``."""
    return _quadratic_system(n, "l", "lb")


def velocity_system(n: int) -> list[CoeffPolynomial]:
    """``du_k/dt = sum_{j=1}^{n-k} (j-k) conj(u_j) u_{j+k}`` in variables ``(u, ub)``."""
    return _quadratic_system(n, "u", "ub")


def conjugated_momentum_system(n: int) -> list[CoeffPolynomial]:
    """Conjugate of the momentum system rewritten in ``u = conj(l)``.

    Conjugation swaps ``l`` with ``lbar`` and conjugates coefficients; the
    substitution ``lbar -> u, l -> ub`` swaps them back into ``(u, ub)`` slots.
    """
    mom = momentum_system(n)
    swap = list(range(n + 1, 2 * n + 1)) + list(range(1, n + 1))
    _, _, names = _pair_ring(n, "u", "ub")
    out = []
    for p in mom:
        conj = p.conjugate_coefficients().permute(swap)
        out.append(conj.permute(swap, names))
    return out


def energy_rate_polynomial(n: int) -> CoeffPolynomial:
    """``sum_k conj(u_k) du_k/dt``; identically zero by pairwise skew-symmetry."""
    vel = velocity_system(n)
    _, ub, _ = _pair_ring(n, "u", "ub")
    acc = CoeffPolynomial.zero(2 * n, vel[0].names)
    for k in range(1, n + 1):
        acc = acc + ub[k] * vel[k - 1]
    return acc


def pair_contributions(n: int) -> dict[tuple[int, int], CoeffPolynomial]:
    """Contribution of each unordered pair ``{j, k}`` to ``sum_k conj(u_k) du_k/dt``."""
    _, _, names = _pair_ring(n, "u", "ub")
    u, ub, _ = _pair_ring(n, "u", "ub")
    out: dict[tuple[int, int], CoeffPolynomial] = {}
    for k in range(1, n + 1):
        for j in range(1, n - k + 1):
            key = (min(j, k), max(j, k))
            term = ub[k] * ub[j] * u[j + k] * (j - k)
            out[key] = out.get(key, CoeffPolynomial.zero(2 * n, names)) + term
    return out
