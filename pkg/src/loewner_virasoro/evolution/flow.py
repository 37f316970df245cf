"""Löwner-Kufarev coefficient flow with its conjugate momenta.

The state is ``f(z, t) = z + c_1 z^2 + ... + c_n z^{n+1}`` together with
momenta ``psibar_1..psibar_n`` (and optionally ``psibar_0``).  Coefficients
follow ``df/dt = f (1 - p(e^{-t} f, t))``; momenta follow the adjoint flow
``dpsibar_j/dt = -psibar_j + sum_{k>=j} psibar_k q_{k-j}`` with
``q(w) = p(w) + w p'(w)`` evaluated at ``w = e^{-t} f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..export import csv_text, write_text
from ..series import TruncatedTaylor, compose, derivative, mul
from .driving import DrivingFunction

BLOWUP_BOUND = 1e6


class BlowUpError(RuntimeError):
    """Raised when a coefficient leaves the admissible bound."""

    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


class DegenerateNormalizationError(RuntimeError):
    """Raised when ``a_0`` reaches zero in the alternate evolution."""


@dataclass(frozen=True)
class EvolutionState:
    t: float
    c: np.ndarray
    psibar: np.ndarray | None = None
    psibar0: complex | None = None
    a0: complex | None = None

    @property
    def n(self) -> int:
        return len(self.c)

    def function_series(self) -> TruncatedTaylor:
        """``f`` as a series of order ``n + 1``."""
        return TruncatedTaylor(np.concatenate(([0.0, 1.0], self.c)))


@dataclass
class Trajectory:
    states: list[EvolutionState]
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.states[0].n

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def c(self) -> np.ndarray:
        return np.array([s.c for s in self.states])

    @property
    def psibar(self) -> np.ndarray:
        return np.array([s.psibar for s in self.states])

    @property
    def final(self) -> EvolutionState:
        return self.states[-1]

    def csv_header(self) -> list[str]:
        n = self.n
        cols = ["t"]
        cols += [f"{p}_c{k}" for k in range(1, n + 1) for p in ("re", "im")]
        if self.states[0].psibar is not None:
            cols += [f"{p}_psibar{k}" for k in range(1, n + 1) for p in ("re", "im")]
        if self.states[0].psibar0 is not None:
            cols += ["re_psibar0", "im_psibar0"]
        return cols

    def csv_rows(self) -> list[list[float]]:
        rows = []
        for s in self.states:
            row = [s.t]
            for v in s.c:
                row += [v.real, v.imag]
            if s.psibar is not None:
                for v in s.psibar:
                    row += [v.real, v.imag]
            if s.psibar0 is not None:
                row += [s.psibar0.real, s.psibar0.imag]
            rows.append(row)
        return rows

    def to_csv(self, path) -> None:
        write_text(Path(path), csv_text(self.csv_header(), self.csv_rows()))


# --------------------------------------------------------------------------
# right-hand sides


def _driver_series(p, t: float) -> TruncatedTaylor:
    if isinstance(p, DrivingFunction):
        return p.series(t)
    if isinstance(p, TruncatedTaylor):
        return p
    return p(t)


def coefficient_velocity(c: Sequence[complex], p, t: float) -> np.ndarray:
    """``dc_k/dt`` = coefficient of ``z^{k+1}`` in ``f (1 - p(e^{-t} f, t))``."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    f = TruncatedTaylor(np.concatenate(([0.0, 1.0], c)))
    f_over_z = TruncatedTaylor(np.concatenate(([1.0], c)))
    P = _driver_series(p, t)
    if P.order < n:
        raise ValueError(f"driver has order {P.order} < n = {n}")
    g = compose(P.truncate(n), f.scale(math.exp(-t)))
    out = mul(f_over_z, TruncatedTaylor.constant(1.0, n) - g)
    return np.asarray(out.coeffs[1:])


def q_series(c: Sequence[complex], p, t: float) -> TruncatedTaylor:
    """``q(w) = p(w) + w p'(w)`` at ``w = e^{-t} f``, through ``z^n``."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    P = _driver_series(p, t).truncate(n)
    wp_prime = derivative(P.shift(1))
    f = TruncatedTaylor(np.concatenate(([0.0, 1.0], c)))
    return compose(wp_prime, f.scale(math.exp(-t)))


def momentum_velocity(c: Sequence[complex], psibar: Sequence[complex], p, t: float,
                      psibar0: complex | None = None) -> tuple[np.ndarray, complex | None]:
    """Adjoint flow of the momenta; ``psibar_n`` is constant when ``p_0 = 1``."""
    psibar = np.asarray(psibar, dtype=complex)
    n = len(psibar)
    q = q_series(c, p, t).coeffs
    out = np.empty(n, dtype=complex)
    for j in range(1, n + 1):
        k = np.arange(j + 1, n + 1)
        out[j - 1] = (q[0] - 1.0) * psibar[j - 1] + np.sum(psibar[k - 1] * q[k - j])
    d0 = None
    if psibar0 is not None:
        k = np.arange(1, n + 1)
        d0 = (q[0] - 1.0) * psibar0 + np.sum(psibar[k - 1] * q[k])
    return out, d0


# --------------------------------------------------------------------------
# integration


def _step_grid(t0: float, t_end: float, dt: float, breakpoints: Sequence[float]) -> list[float]:
    """Uniform steps of ``dt``, split at breakpoints and shortened to hit ``t_end``."""
    marks = sorted({b for b in breakpoints if t0 < b < t_end} | {t_end})
    grid = [t0]
    start = t0
    for m in marks:
        full = int(math.floor((m - start) / dt + 1e-9))
        grid.extend(start + i * dt for i in range(1, full + 1))
        if grid[-1] < m - 1e-12 * max(1.0, abs(m)):
            grid.append(m)
        else:
            grid[-1] = m
        start = m
    return grid


def rk4(rhs: Callable[[float, np.ndarray], np.ndarray], y: np.ndarray, t: float, h: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + h / 2, y + h / 2 * k1)
    k3 = rhs(t + h / 2, y + h / 2 * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(
    initial: EvolutionState,
    p: DrivingFunction,
    t_end: float,
    dt: float,
    record_every: int = 1,
    bound: float = BLOWUP_BOUND,
) -> Trajectory:
    """Fixed-step RK4 for ``(c, psibar)``.

    Steps land exactly on the driver's breakpoints and on ``t_end``.  Momenta
    are carried only when ``initial.psibar`` is set; ``psibar_0`` likewise.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < initial.t:
        raise ValueError("t_end precedes the initial time")
    n = initial.n
    if isinstance(p, DrivingFunction) and p.order < n:
        raise ValueError(f"driver order {p.order} is below n = {n}")
    with_psi = initial.psibar is not None
    with_psi0 = initial.psibar0 is not None
    if with_psi0 and not with_psi:
        raise ValueError("psibar0 requires psibar")

    def pack(s: EvolutionState) -> np.ndarray:
        parts = [np.asarray(s.c, dtype=complex)]
        if with_psi:
            parts.append(np.asarray(s.psibar, dtype=complex))
        if with_psi0:
            parts.append(np.array([s.psibar0], dtype=complex))
        return np.concatenate(parts)

    def unpack(t: float, y: np.ndarray) -> EvolutionState:
        return EvolutionState(
            t,
            y[:n].copy(),
            y[n : 2 * n].copy() if with_psi else None,
            complex(y[2 * n]) if with_psi0 else None,
        )

    piecewise = isinstance(p, DrivingFunction) and p.kind == "piecewise"
    drv = p

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        c = y[:n]
        parts = [coefficient_velocity(c, drv, t)]
        if with_psi:
            dpsi, d0 = momentum_velocity(c, y[n : 2 * n], drv, t, y[2 * n] if with_psi0 else None)
            parts.append(dpsi)
            if with_psi0:
                parts.append(np.array([d0]))
        return np.concatenate(parts)

    grid = _step_grid(initial.t, t_end, dt, p.breakpoints() if isinstance(p, DrivingFunction) else [])
    y = pack(initial)
    states = [unpack(initial.t, y)]
    meta = {"n": n, "dt": dt, "t_end": t_end, "steps": len(grid) - 1, "method": "rk4"}
    for i, (ta, tb) in enumerate(zip(grid, grid[1:]), start=1):
        if piecewise:
            # steps never straddle a jump; freeze the segment so the last stage does not see the next one
            drv = p.series(ta)
        y = rk4(rhs, y, ta, tb - ta)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y[:n])) > bound:
            states.append(unpack(tb, y))
            raise BlowUpError(f"coefficients exceeded {bound:g} at t={tb:.6g}", Trajectory(states, meta))
        if i % record_every == 0 or i == len(grid) - 1:
            states.append(unpack(tb, y))
    return Trajectory(states, meta)


def richardson_error(initial: EvolutionState, p: DrivingFunction, t_end: float, dt: float) -> float:
    """Step-halving estimate of the RK4 error at ``t_end``: ``max|y_dt - y_dt/2| / 15``."""
    ends = [integrate(initial, p, t_end, h, record_every=10**9).final for h in (dt, dt / 2)]
    diff = [np.max(np.abs(ends[0].c - ends[1].c))]
    if initial.psibar is not None:
        diff.append(np.max(np.abs(ends[0].psibar - ends[1].psibar)))
    return float(max(diff)) / 15.0


def loewner_limit(p: DrivingFunction, T: float, n: int | None = None, dt: float = 1e-2) -> tuple[np.ndarray, float]:
    """Coefficients of ``lim e^t w(z, t)`` approximated at time ``T``.

    The second value is a first-order tail estimate: coefficient velocities
    decay like ``e^{-t}``, so ``|c(inf) - c(T)|`` is about ``max_k |dc_k/dt(T)|``.
    """
    n = p.order if n is None else n
    traj = integrate(EvolutionState(0.0, np.zeros(n, dtype=complex)), p, T, dt, record_every=10**9)
    cT = traj.final.c
    tail = float(np.max(np.abs(coefficient_velocity(cT, p, T))))
    return cT, tail


def closed_form_linear(p1: complex, t: float, n: int) -> np.ndarray:
    """Exact ``c_k(t) = (-p_1 (1 - e^{-t}))^k`` for ``p = 1 + p_1 z`` started at ``f = z``."""
    a = -p1 * (1 - math.exp(-t))
    return np.array([a**k for k in range(1, n + 1)], dtype=complex)


# --------------------------------------------------------------------------
# alternate (non-normalized) evolution


NORMALIZATIONS = ("divide", "rescale")


def alternate_velocity(a: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``da_k/dt = sum_{i<=k} (i+1) a_i u_{k-i}`` from ``dF/dt = z F' p``."""
    n1 = len(a)
    fprime = np.arange(1, n1 + 1) * a
    return np.convolve(fprime, u[:n1])[:n1]


def normalized_coefficients(a: np.ndarray, normalization: str) -> np.ndarray:
    a0 = a[0]
    if a0 == 0:
        raise DegenerateNormalizationError("a_0 vanished")
    k = np.arange(1, len(a))
    if normalization == "divide":
        return a[1:] / a0
    if normalization == "rescale":
        return a[1:] / a0 ** (k + 1)
    raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def alternate_evolve(
    initial: EvolutionState,
    controls: Callable[[float], Sequence[complex]],
    t_end: float,
    dt: float,
    normalization: str = "divide",
    record_every: int = 1,
    tol: float = 1e-14,
) -> Trajectory:
    """Integrate ``dF/dt = z F'(z) p(z, t)`` with ``p = u_0 + u_1 z + ...``.

    ``F = a_0 (z + c_1 z^2 + ...)`` with ``a_0 = initial.a0`` (default 1).
    Recorded states carry the ``divide`` (``a_k/a_0``) or ``rescale``
    (``a_k/a_0^{k+1}``, i.e. ``F(z/a_0)``) normalized coefficients.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    a0 = 1.0 if initial.a0 is None else complex(initial.a0)
    a = np.concatenate(([a0], a0 * np.asarray(initial.c, dtype=complex)))
    n1 = len(a)

    def u_at(t: float) -> np.ndarray:
        u = np.zeros(n1, dtype=complex)
        vals = np.asarray(controls(t), dtype=complex)
        m = min(len(vals), n1)
        u[:m] = vals[:m]
        return u

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return alternate_velocity(y, u_at(t))

    def state(t: float, y: np.ndarray) -> EvolutionState:
        if abs(y[0]) <= tol:
            raise DegenerateNormalizationError(f"a_0 reached 0 at t={t:.6g}")
        return EvolutionState(t, normalized_coefficients(y, normalization), a0=complex(y[0]))

    grid = _step_grid(initial.t, t_end, dt, [])
    states = [state(initial.t, a)]
    for i, (ta, tb) in enumerate(zip(grid, grid[1:]), start=1):
        a = rk4(rhs, a, ta, tb - ta)
        s = state(tb, a)
        if i % record_every == 0 or i == len(grid) - 1:
            states.append(s)
    return Trajectory(states, {"normalization": normalization, "dt": dt, "t_end": t_end})
