"""Driving functions ``p(z, t) = p_0(t) + p_1(t) z + ...`` for Löwner-Kufarev flows."""

from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ..series import TruncatedTaylor

KINDS = ("constant", "piecewise", "kernel", "table")


class DrivingError(ValueError):
    """Malformed or inadmissible driving function."""


def parse_complex(x) -> complex:
    """Accept a JSON number or a ``[re, im]`` pair."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise DrivingError(f"complex value must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float, complex)) and not isinstance(x, bool):
        return complex(x)
    raise DrivingError(f"not a number: {x!r}")


def kernel_series(u: float, n: int) -> TruncatedTaylor:
    """Taylor series of ``(e^{iu} + z)/(e^{iu} - z)``: ``1 + 2 sum_k e^{-iku} z^k``."""
    return TruncatedTaylor([1.0] + [2.0 * cmath.exp(-1j * k * u) for k in range(1, n + 1)])


def _pad(coeffs: Sequence[complex], n: int) -> np.ndarray:
    out = np.zeros(n + 1, dtype=complex)
    m = min(len(coeffs), n + 1)
    out[:m] = np.asarray(coeffs, dtype=complex)[:m]
    return out


@dataclass(frozen=True)
class DrivingFunction:
    """A time-dependent truncated Carathéodory-type series.

    ``kind`` selects how ``data`` is read:

    ``constant``
        ``{"p": [p0, p1, ...]}`` constant in time.
    ``piecewise``
        ``{"times": [t0, t1, ...], "p": [[...], [...], ...]}``; segment ``i``
        holds on ``[t_i, t_{i+1})``, the last one forever.
    ``kernel``
        Löwner's point kernel with ``{"u": value}``, a table
        ``{"u": {"times": [...], "values": [...]}}`` (linear interpolation),
        or a Python callable ``u(t)``.
    ``table``
        ``{"times": [...], "p": [[...], ...]}`` with coefficients linearly
        interpolated in ``t`` and held constant outside the table.
    """

    kind: str
    data: dict = field(default_factory=dict)
    order: int = 8
    allow_alternate: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DrivingError(f"unknown driving kind {self.kind!r}; expected one of {KINDS}")
        if self.order < 1:
            raise DrivingError("order must be >= 1")
        object.__setattr__(self, "_cache", self._prepare())
        if not self.allow_alternate:
            for t in self.check_times():
                p0 = self.series(t)[0]
                if abs(p0 - 1) > 1e-12:
                    raise DrivingError(f"p(0, {t}) = {p0} but normalization requires 1")
                rep = caratheodory_check(self, t)
                if not rep.ok:
                    raise DrivingError(
                        f"Re p is not positive at t={t} (min {rep.margin:.3g}); "
                        "set allow_alternate for non-subordinating drivers"
                    )

    # -- construction helpers ---------------------------------------------

    @classmethod
    def constant(cls, p: Sequence[complex], order: int | None = None, **kw) -> "DrivingFunction":
        order = len(p) - 1 if order is None else order
        return cls("constant", {"p": list(p)}, max(order, 1), **kw)

    @classmethod
    def kernel(cls, u: float | Callable[[float], float] | dict, order: int = 8, **kw) -> "DrivingFunction":
        return cls("kernel", {"u": u}, order, **kw)

    @classmethod
    def from_json(cls, data: dict, order: int | None = None) -> "DrivingFunction":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind is None:
            raise DrivingError("driving function needs a 'kind'")
        n = data.pop("order", order)
        alt = bool(data.pop("allow_alternate", False))
        if n is None:
            if kind in ("constant",):
                n = max(len(data.get("p", [])) - 1, 1)
            else:
                n = 8
        return cls(kind, data, int(n), alt)

    def to_json(self) -> dict:
        data = {}
        for k, v in self.data.items():
            if callable(v):
                data[k] = getattr(v, "__name__", "callable")
            else:
                data[k] = v
        return {"kind": self.kind, "order": self.order, "allow_alternate": self.allow_alternate, **data}

    def _prepare(self):
        d = self.data
        n = self.order
        if self.kind == "constant":
            if "p" not in d:
                raise DrivingError("constant driver needs 'p'")
            return _pad([parse_complex(x) for x in d["p"]], n)
        if self.kind in ("piecewise", "table"):
            times = [float(t) for t in d.get("times", [])]
            rows = d.get("p", [])
            if not times or len(times) != len(rows):
                raise DrivingError(f"{self.kind} driver needs equally long 'times' and 'p'")
            if any(b <= a for a, b in zip(times, times[1:])):
                raise DrivingError("'times' must be strictly increasing")
            return times, [_pad([parse_complex(x) for x in r], n) for r in rows]
        # kernel
        u = d.get("u", 0.0)
        if callable(u):
            return u
        if isinstance(u, dict):
            ts = [float(t) for t in u["times"]]
            vs = [float(v) for v in u["values"]]
            if len(ts) != len(vs) or not ts:
                raise DrivingError("kernel table needs equally long 'times' and 'values'")
            return lambda t: float(np.interp(t, ts, vs))
        val = float(u)
        return lambda t: val

    # -- evaluation -------------------------------------------------------

    def coefficients(self, t: float) -> np.ndarray:
        """``p_0(t)..p_n(t)`` as a complex array."""
        cache = self._cache
        if self.kind == "constant":
            return cache
        if self.kind == "kernel":
            u = cache(t)
            k = np.arange(1, self.order + 1)
            return np.concatenate(([1.0 + 0j], 2.0 * np.exp(-1j * k * u)))
        times, rows = cache
        if self.kind == "piecewise":
            i = max(bisect.bisect_right(times, t) - 1, 0)
            return rows[i]
        if t <= times[0]:
            return rows[0]
        if t >= times[-1]:
            return rows[-1]
        i = bisect.bisect_right(times, t) - 1
        w = (t - times[i]) / (times[i + 1] - times[i])
        return (1 - w) * rows[i] + w * rows[i + 1]

    def series(self, t: float) -> TruncatedTaylor:
        return TruncatedTaylor(self.coefficients(t))

    def evaluate(self, z: complex, t: float) -> complex:
        """Value of the driver at ``z``; the kernel uses its closed form, not the truncation."""
        if self.kind == "kernel":
            e = cmath.exp(1j * self._cache(t))
            return (e + z) / (e - z)
        coeffs = self.coefficients(t)
        return complex(np.polyval(coeffs[::-1], z))

    def breakpoints(self) -> list[float]:
        """Times where the driver may jump; integrators step onto them exactly."""
        if self.kind == "piecewise":
            return list(self._cache[0][1:])
        return []

    def check_times(self) -> list[float]:
        if self.kind in ("piecewise", "table"):
            times = self._cache[0]
            mids = [(a + b) / 2 for a, b in zip(times, times[1:])]
            return sorted(set(times) | set(mids))
        return [0.0]


class CaratheodoryReport(NamedTuple):
    ok: bool
    margin: float


def caratheodory_check(
    p: DrivingFunction | Callable[[complex], complex],
    t: float = 0.0,
    grid: int = 256,
    eps: float = 1e-3,
    radii: int = 16,
) -> CaratheodoryReport:
    """Minimum of ``Re p`` over circles ``|z| = r <= 1 - eps``; ok iff it is positive."""
    if isinstance(p, DrivingFunction):
        if p.kind == "kernel":
            f = lambda z: p.evaluate(z, t)  # noqa: E731
        else:
            coeffs = p.coefficients(t)[::-1]
            f = lambda z: np.polyval(coeffs, z)  # noqa: E731
    else:
        f = p
    theta = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    rs = np.linspace(0.0, 1.0 - eps, radii + 1)
    best = math.inf
    for r in rs:
        z = r * np.exp(1j * theta)
        vals = np.real(np.asarray(f(z), dtype=complex))
        best = min(best, float(np.min(vals)))
    return CaratheodoryReport(best > 0, best)
