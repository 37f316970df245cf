"""Conserved Virasoro functionals along a flow and the non-positive generators.

Along a trajectory the pairing of ``f'(z)`` with the momentum series
``psibar(z) = sum_j psibar_j z^{-j}`` gives ``Lcal_m = [z^{-m}] f' psibar``.
Only the indices that do not touch unknown momenta are reported.

The generators ``L_0, L_{-1}, L_{-2}`` are obtained from ``Lcal_{-k}`` by
eliminating ``psibar_0, psibar_{-1}, psibar_{-2}`` in favour of the
functionals ``psibar_0^*, psibar_{-1}^*, psibar_{-2}^*``; deeper ones come
from ``L_{-k} = {L_{-k+1}, L_{-1}} / (k-2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebra import CoeffPolynomial, CovariantFunctional, poisson_bracket
from ..series import LaurentWindow, TruncatedTaylor, derivative, laurent_mul, reciprocal
from .flow import Trajectory

# --------------------------------------------------------------------------
# conserved quantities along a trajectory


@dataclass(frozen=True)
class ConservedSeries:
    k: int
    name: str
    series: np.ndarray
    max_abs_drift: float
    max_rel_drift: float

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "name": self.name,
            "series": [[complex(v).real, complex(v).imag] for v in self.series],
            "max_abs_drift": self.max_abs_drift,
            "max_rel_drift": self.max_rel_drift,
        }


@dataclass(frozen=True)
class ConservedReport:
    times: np.ndarray
    entries: list[ConservedSeries] = field(default_factory=list)

    def __getitem__(self, k: int) -> ConservedSeries:
        for e in self.entries:
            if e.k == k:
                return e
        raise KeyError(k)

    @property
    def indices(self) -> list[int]:
        return [e.k for e in self.entries]

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


def pairing_window(c, psibar, psibar0=None) -> LaurentWindow:
    """``f'(z) * psibar(z)`` with its exactly known index range."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    fprime = TruncatedTaylor(np.concatenate(([1.0], np.arange(2, n + 2) * c)))
    a = LaurentWindow.from_taylor(fprime, n)
    terms = {-j: complex(psibar[j - 1]) for j in range(1, n + 1)}
    hi = -1
    if psibar0 is not None:
        terms[0] = complex(psibar0)
        hi = 0
    b = LaurentWindow.from_mapping(terms, n, (-n, hi), zero_below=True, zero_above=False)
    return laurent_mul(a, b)


def conserved_virasoro(traj: Trajectory) -> ConservedReport:
    """``Lcal_m`` along the trajectory for every index the truncation determines.

    Relative drift is measured against the largest magnitude of the series
    (0 when the series vanishes identically).
    """
    s0 = traj.states[0]
    if s0.psibar is None:
        raise ValueError("trajectory carries no momenta")
    windows = [pairing_window(s.c, s.psibar, s.psibar0) for s in traj.states]
    M = windows[0].window
    known = [m for m in range(-M, M + 1) if all(w.is_known(-m) for w in windows)]
    entries = []
    for m in known:
        series = np.array([w[-m] for w in windows], dtype=complex)
        drift = float(np.max(np.abs(series - series[0])))
        scale = float(np.max(np.abs(series)))
        rel = drift / scale if scale > 0 else 0.0
        name = f"L_{m}" if m >= 1 else f"Lcal_{m}"
        entries.append(ConservedSeries(m, name, series, drift, rel))
    return ConservedReport(traj.times, entries)


# --------------------------------------------------------------------------
# non-positive generators


def _ring(n: int):
    return [None] + [CoeffPolynomial.variable(k, n) for k in range(1, n + 1)]


def _fprime_coeff(c, j: int, n: int) -> CoeffPolynomial | None:
    """``f'_j = (j+1) c_j`` with ``f'_0 = 1``; ``None`` beyond the truncation."""
    if j == 0:
        return CoeffPolynomial.constant(1, n)
    if j > n:
        return None
    return c[j] * (j + 1)


def lcal_negative(k: int, n: int) -> CovariantFunctional:
    """``Lcal_{-k} = sum_{j >= -k} f'_{k+j} psibar_j`` (trusted for ``j <= n-k``)."""
    c = _ring(n)
    coeffs = []
    for j in range(1, n + 1):
        v = _fprime_coeff(c, k + j, n)
        coeffs.append(v if v is not None else CoeffPolynomial.zero(n))
    extra = {}
    for j in range(-k, 1):
        extra[j] = _fprime_coeff(c, k + j, n)
    return CovariantFunctional(tuple(coeffs), extra, max(n - k, 0))


def psibar_star(k: int, n: int) -> CovariantFunctional:
    """The functionals replacing ``psibar_0, psibar_{-1}, psibar_{-2}``."""
    c = _ring(n)
    zero = CoeffPolynomial.zero(n)
    if k == 0:
        return CovariantFunctional(tuple(-c[j] for j in range(1, n + 1)))
    if k == -1:
        return CovariantFunctional(tuple(zero for _ in range(n)))
    if k == -2:
        # [z^{j+1}] of 1/z - 1/f - c_1 - (c_2 - c_1^2) f
        one = CoeffPolynomial.constant(1, n)
        R = reciprocal(TruncatedTaylor([one] + c[1:]))
        c2 = c[2] if n >= 2 else zero
        lam = c2 - c[1] * c[1]
        coeffs = []
        for j in range(1, n + 1):
            r = R[j + 2] if j + 2 <= n else zero
            coeffs.append(-r - lam * c[j])
        return CovariantFunctional(tuple(coeffs), {}, max(n - 2, 0))
    raise ValueError("psibar_star is defined for k = 0, -1, -2")


def build_L_nonpositive(n: int, depth: int) -> list[CovariantFunctional]:
    """``[L_0, L_{-1}, ..., L_{-depth}]`` as momenta-linear functionals on the body.

    ``L_{-k}`` is trustworthy in slots ``1..n-k``, so ``depth`` must stay below ``n``.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 <= depth <= n - 1:
        raise ValueError(f"depth must lie in 0..{n - 1} so that L_(-depth) keeps a trusted slot")
    c = _ring(n)
    stars = {0: psibar_star(0, n), -1: psibar_star(-1, n), -2: psibar_star(-2, n)}
    diff = {k: CovariantFunctional.momentum(k, n) - stars[k] for k in stars}

    out = []
    for k in range(0, min(depth, 2) + 1):
        L = lcal_negative(k, n)
        for i in range(0, k + 1):
            # coefficient f'_{k-i} of psibar_{-i} in Lcal_{-k}
            coef = _fprime_coeff(c, k - i, n)
            L = L - diff[-i] * coef
        if L.extra:
            raise ArithmeticError(f"L_(-{k}) still depends on non-positive momenta")
        out.append(L)
    for k in range(3, depth + 1):
        out.append(poisson_bracket(out[k - 1], out[1]) / (k - 2))
    return out


def bracket_cross_check(n: int, k: int = 5) -> bool:
    """``L_{-k}`` from the recursion against ``{L_{-k+2}, L_{-2}}`` on trusted slots."""
    if k < 5:
        raise ValueError("an independent second route exists for k >= 5")
    Ls = build_L_nonpositive(n, k)
    alt = poisson_bracket(Ls[k - 2], Ls[2]) / (k - 4)
    return Ls[k].equal_on_trusted(alt)


# --------------------------------------------------------------------------
# function-level action


def _pad(a: TruncatedTaylor, order: int) -> TruncatedTaylor:
    """Exact polynomial ``a`` viewed as a series of a higher order."""
    return TruncatedTaylor(list(a.coeffs) + [0 * a.coeffs[0]] * (order - a.order))


def function_level_action(k: int, f: TruncatedTaylor) -> TruncatedTaylor:
    """``L_k[f]`` for ``k = 0, -1, -2`` on a normalized ``f = z + c_1 z^2 + ...``.

    ``L_0[f] = z f' - f``, ``L_{-1}[f] = f' - 1 - 2 c_1 f`` and
    ``L_{-2}[f] = f'/z - 1/f - 3 c_1 + (c_1^2 - 4 c_2) f``.
    """
    if f.order < 2:
        raise ValueError("f must be known through z^2")
    if f.coeffs[0] != 0 or f.coeffs[1] != 1:
        raise ValueError("f must be normalized: f(0) = 0, f'(0) = 1")
    c1 = f.coeffs[2]
    fp = derivative(f)
    if k == 0:
        return fp.shift(1) - f
    one = f.coeffs[1]
    if k == -1:
        return fp - TruncatedTaylor.constant(one, fp.order) - f * (2 * c1)
    if k == -2:
        if f.order < 3:
            raise ValueError("L_-2 needs f through z^3")
        c2 = f.coeffs[3]
        f_over_z = TruncatedTaylor(f.coeffs[1:])
        z_over_f = reciprocal(f_over_z)
        z = TruncatedTaylor([0 * one, one])
        zl = fp - z_over_f - _pad(z, fp.order) * (3 * c1) + f.shift(1) * (c1 * c1 - 4 * c2)
        # z * L_-2[f] has no constant term: the z^{-1} poles cancel
        if zl.coeffs[0] != 0:
            raise ArithmeticError("pole of L_-2[f] did not cancel")
        return TruncatedTaylor(zl.coeffs[1:])
    raise ValueError("function-level action is implemented for k = 0, -1, -2")


@dataclass(frozen=True)
class VerificationRecord:
    k: int
    n: int
    trusted: int
    agree: bool
    low_order_vanish: bool
    mismatches: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return self.agree and self.low_order_vanish


def kirillov_action_check(n: int) -> list[VerificationRecord]:
    """Compare the function-level ``L_0, L_{-1}, L_{-2}`` with :func:`build_L_nonpositive`.

    Entry ``j`` of the functional must equal ``[z^{j+1}] L_k[f]`` for every
    trusted ``j``, and the coefficients of ``z^0, z^1`` must vanish.
    """
    c = _ring(n)
    zero = CoeffPolynomial.zero(n)
    one = CoeffPolynomial.constant(1, n)
    f = TruncatedTaylor([zero, one] + c[1:])
    built = build_L_nonpositive(n, min(2, n - 1))
    records = []
    for idx, L in enumerate(built):
        k = -idx
        series = function_level_action(k, f)
        low = all(series.coeffs[i] == 0 for i in (0, 1) if i <= series.order)
        trusted = min(L.trusted, series.order - 1)
        bad = tuple(j for j in range(1, trusted + 1) if series.coeffs[j + 1] != L.entry(j))
        records.append(VerificationRecord(k, n, trusted, not bad, low, bad))
    return records
