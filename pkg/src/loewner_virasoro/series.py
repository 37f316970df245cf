"""Truncated power series and Laurent windows.

Numeric series keep ``complex128`` coefficients; anything else (exact
Gaussian rationals, :class:`~loewner_virasoro.algebra.CoeffPolynomial`)
is stored in an object array and manipulated with the same operations,
which is how the symbolic recurrences are cross-checked against plain
series arithmetic.

Truncation always propagates the *minimum* order of the operands: a
result never claims more known coefficients than its inputs justify.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

__all__ = [
    "TruncatedTaylor",
    "LaurentWindow",
    "add",
    "mul",
    "compose",
    "reciprocal",
    "derivative",
    "laurent_mul",
]


def _is_plain_number(x) -> bool:
    return isinstance(x, (int, float, complex, np.number)) and not isinstance(x, bool)


def _as_array(coeffs: Iterable[Any]) -> np.ndarray:
    items = list(coeffs)
    if all(_is_plain_number(x) for x in items):
        arr = np.array(items, dtype=complex)
    else:
        arr = np.empty(len(items), dtype=object)
        arr[:] = items
    arr.flags.writeable = False
    return arr


def _convolve(a: np.ndarray, b: np.ndarray, length: int):
    """First ``length`` coefficients of the Cauchy product."""
    if a.dtype != object and b.dtype != object:
        return np.convolve(a[:length], b[:length])[:length]
    out = []
    for k in range(length):
        acc = 0
        for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
            acc = acc + a[i] * b[k - i]
        out.append(acc)
    return out


class TruncatedTaylor:
    """Power series ``a_0 + a_1 z + ... + a_N z^N + O(z^{N+1})``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Any], order: int | None = None):
        if isinstance(coeffs, np.ndarray) and coeffs.dtype != object and order is None:
            arr = np.array(coeffs, dtype=complex)
            if arr.ndim != 1 or len(arr) == 0:
                raise ValueError("coefficients must be a non-empty 1-d sequence")
            arr.flags.writeable = False
            self.coeffs = arr
            return
        items = list(coeffs)
        if order is None:
            order = len(items) - 1
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        if len(items) < order + 1:
            items = items + [0] * (order + 1 - len(items))
        self.coeffs = _as_array(items[: order + 1])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    trunc_order = order

    @classmethod
    def zero(cls, order: int) -> "TruncatedTaylor":
        return cls([0] * (order + 1))

    @classmethod
    def constant(cls, value, order: int) -> "TruncatedTaylor":
        return cls([value] + [0] * order)

    @classmethod
    def identity(cls, order: int) -> "TruncatedTaylor":
        """The series ``z`` (requires order >= 1 to be meaningful)."""
        return cls([0, 1] + [0] * (order - 1), order)

    @property
    def is_numeric(self) -> bool:
        return self.coeffs.dtype != object

    def __getitem__(self, k: int):
        if k < 0:
            raise IndexError("negative power in a Taylor series")
        if k > self.order:
            raise IndexError(f"coefficient z^{k} is beyond truncation order {self.order}")
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def tolist(self) -> list:
        return list(self.coeffs)

    def truncate(self, order: int) -> "TruncatedTaylor":
        if order > self.order:
            raise ValueError("cannot raise truncation order")
        return TruncatedTaylor(self.coeffs[: order + 1])

    def shift(self, k: int) -> "TruncatedTaylor":
        """Multiply by ``z^k``; known coefficients grow by ``k`` as well."""
        if k < 0:
            raise ValueError("shift must be non-negative")
        if self.is_numeric:
            return TruncatedTaylor(np.concatenate((np.zeros(k, dtype=complex), self.coeffs)))
        return TruncatedTaylor([0] * k + list(self.coeffs))

    def scale(self, s) -> "TruncatedTaylor":
        if self.is_numeric and _is_plain_number(s):
            return TruncatedTaylor(self.coeffs * s)
        return TruncatedTaylor([s * x for x in self.coeffs])

    def dilate(self, s) -> "TruncatedTaylor":
        """``a(s z)``."""
        out, w = [], 1
        for x in self.coeffs:
            out.append(x * w)
            w = w * s
        return TruncatedTaylor(out)

    def __call__(self, z):
        acc = 0
        for x in reversed(self.coeffs):
            acc = acc * z + x
        return acc

    def __add__(self, other):
        if isinstance(other, TruncatedTaylor):
            return add(self, other)
        return add(self, TruncatedTaylor.constant(other, self.order))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, TruncatedTaylor):
            return add(self, -other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedTaylor):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedTaylor):
            return NotImplemented
        return self.order == other.order and all(
            x == y for x, y in zip(self.coeffs, other.coeffs)
        )

    def __repr__(self) -> str:
        return f"TruncatedTaylor({self.tolist()!r}, order={self.order})"


def add(a: TruncatedTaylor, b: TruncatedTaylor) -> TruncatedTaylor:
    n = min(a.order, b.order)
    if a.is_numeric and b.is_numeric:
        return TruncatedTaylor(a.coeffs[: n + 1] + b.coeffs[: n + 1])
    return TruncatedTaylor([a.coeffs[k] + b.coeffs[k] for k in range(n + 1)])


def mul(a: TruncatedTaylor, b: TruncatedTaylor) -> TruncatedTaylor:
    n = min(a.order, b.order)
    return TruncatedTaylor(_convolve(a.coeffs, b.coeffs, n + 1))


def compose(a: TruncatedTaylor, b: TruncatedTaylor) -> TruncatedTaylor:
    """``a(b(z))`` by Horner's rule; ``b`` must vanish at the origin."""
    if b.coeffs[0] != 0:
        raise ValueError("compose: inner series must have zero constant term")
    n = min(a.order, b.order)
    if a.is_numeric and b.is_numeric:
        bc = b.coeffs[: n + 1]
        acc = np.zeros(n + 1, dtype=complex)
        acc[0] = a.coeffs[n]
        for k in range(n - 1, -1, -1):
            acc = np.convolve(acc, bc)[: n + 1]
            acc[0] += a.coeffs[k]
        return TruncatedTaylor(acc)
    bb = b.truncate(n)
    acc = TruncatedTaylor.constant(a.coeffs[n] if n <= a.order else 0, n)
    for k in range(n - 1, -1, -1):
        acc = mul(acc, bb) + a.coeffs[k]
    return acc


def reciprocal(a: TruncatedTaylor) -> TruncatedTaylor:
    a0 = a.coeffs[0]
    if a0 == 0:
        raise ZeroDivisionError("reciprocal: series with zero constant term is not invertible")
    inv0 = 1 / a0
    out = [inv0]
    for k in range(1, a.order + 1):
        acc = 0
        for j in range(1, k + 1):
            acc = acc + a.coeffs[j] * out[k - j]
        out.append(-(acc * inv0))
    return TruncatedTaylor(out)


def derivative(a: TruncatedTaylor) -> TruncatedTaylor:
    if a.order == 0:
        raise ValueError("derivative of an order-0 series carries no known coefficients")
    if a.is_numeric:
        return TruncatedTaylor(np.arange(1, a.order + 1) * a.coeffs[1:])
    return TruncatedTaylor([k * a.coeffs[k] for k in range(1, a.order + 1)])


# --------------------------------------------------------------------------
# Laurent windows


@dataclass(frozen=True, eq=False)
class LaurentWindow:
    """Coefficients of ``z^-M .. z^M`` plus what is known about the rest.

    ``valid = (lo, hi)`` is the index range whose stored coefficients are
    exact.  ``zero_below`` / ``zero_above`` say whether the true series is
    known to vanish below ``lo`` / above ``hi``; when a flag is false the
    tail on that side is unknown (e.g. the ignored terms of a truncated
    Taylor series).  Stored entries outside ``valid`` are not meaningful.
    """

    coeffs: tuple
    window: int
    valid: tuple[int, int]
    zero_below: bool = True
    zero_above: bool = True

    def __post_init__(self):
        if len(self.coeffs) != 2 * self.window + 1:
            raise ValueError("coeffs must have length 2*window + 1")
        lo, hi = self.valid
        if not -self.window <= lo <= hi <= self.window:
            raise ValueError("validity range must be a non-empty sub-range of the window")

    @classmethod
    def from_mapping(
        cls,
        terms: dict[int, Any],
        window: int,
        valid: tuple[int, int] | None = None,
        zero_below: bool = True,
        zero_above: bool = True,
    ) -> "LaurentWindow":
        coeffs = [0] * (2 * window + 1)
        for k, v in terms.items():
            if abs(k) > window:
                raise ValueError(f"power {k} outside window {window}")
            coeffs[k + window] = v
        if valid is None:
            valid = (-window, window)
        return cls(tuple(coeffs), window, valid, zero_below, zero_above)

    @classmethod
    def from_taylor(cls, a: TruncatedTaylor, window: int) -> "LaurentWindow":
        """Embed a truncated Taylor series; the tail above its order is unknown."""
        hi = min(a.order, window)
        terms = {k: a.coeffs[k] for k in range(hi + 1)}
        return cls.from_mapping(
            terms, window, (0, hi), zero_below=True, zero_above=False
        )

    def __getitem__(self, k: int):
        if abs(k) > self.window:
            raise IndexError(f"power {k} outside window {self.window}")
        return self.coeffs[k + self.window]

    def is_valid(self, k: int) -> bool:
        return self.valid[0] <= k <= self.valid[1]

    def is_known(self, k: int) -> bool:
        """Exact, or outside the valid range on a side known to vanish."""
        lo, hi = self.valid
        return lo <= k <= hi or (k < lo and self.zero_below) or (k > hi and self.zero_above)

    def trusted(self) -> dict[int, Any]:
        lo, hi = self.valid
        return {k: self[k] for k in range(lo, hi + 1)}


def _support(w: LaurentWindow) -> tuple[int, int]:
    """Valid range with stored zeros trimmed on the sides known to vanish."""
    lo, hi = w.valid
    if w.zero_below:
        while lo < hi and w[lo] == 0:
            lo += 1
    if w.zero_above:
        while hi > lo and w[hi] == 0:
            hi -= 1
    return lo, hi


def laurent_mul(a: LaurentWindow, b: LaurentWindow) -> LaurentWindow:
    """Convolution on the common window, with the exact sub-range tracked.

    The product coefficient at ``k`` is exact iff every pair ``(i, k-i)``
    that touches an unknown coefficient of one factor meets a coefficient
    of the other factor known to be zero.
    """
    M = max(a.window, b.window)
    alo, ahi = _support(a)
    blo, bhi = _support(b)

    lo_bounds = [alo + blo]
    hi_bounds = [ahi + bhi]
    ok = True
    # unknown a above ahi must meet known zeros of b below blo
    if not a.zero_above:
        if b.zero_below:
            hi_bounds.append(ahi + blo)
        else:
            ok = False
    if not b.zero_above:
        if a.zero_below:
            hi_bounds.append(bhi + alo)
        else:
            ok = False
    if not a.zero_below:
        if b.zero_above:
            lo_bounds.append(alo + bhi)
        else:
            ok = False
    if not b.zero_below:
        if a.zero_above:
            lo_bounds.append(blo + ahi)
        else:
            ok = False
    lo = max(max(lo_bounds), -M)
    hi = min(min(hi_bounds), M)
    if not ok or lo > hi:
        raise ValueError("laurent_mul: no coefficient of the product is exactly determined")

    coeffs = []
    for k in range(-M, M + 1):
        acc = 0
        if lo <= k <= hi:
            for i in range(max(alo, k - bhi), min(ahi, k - blo) + 1):
                acc = acc + a[i] * b[k - i]
        coeffs.append(acc)
    zero_below = a.zero_below and b.zero_below and lo == alo + blo
    zero_above = a.zero_above and b.zero_above and hi == ahi + bhi
    return LaurentWindow(tuple(coeffs), M, (lo, hi), zero_below, zero_above)
