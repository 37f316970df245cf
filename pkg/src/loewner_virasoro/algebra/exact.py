"""Exact complex numbers with rational real and imaginary parts."""

from __future__ import annotations

from fractions import Fraction
from numbers import Complex, Rational


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class QI:
    """Gaussian rational ``re + i*im`` with :class:`fractions.Fraction` parts.

    Compares equal to plain ints/Fractions when the imaginary part vanishes,
    so generic code can test ``x == 0``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            object.__setattr__(self, "re", re.re)
            object.__setattr__(self, "im", re.im)
            return
        if isinstance(re, complex):
            object.__setattr__(self, "re", Fraction(re.real))
            object.__setattr__(self, "im", Fraction(re.imag) + _to_fraction(im))
            return
        object.__setattr__(self, "re", _to_fraction(re))
        object.__setattr__(self, "im", _to_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    @staticmethod
    def coerce(x) -> "QI":
        return x if isinstance(x, QI) else QI(x)

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, QI):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self) -> "QI":
        return QI(-self.re, -self.im)

    def __pos__(self) -> "QI":
        return self

    def __add__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            o = QI.coerce(other)
            return QI(self.re + o.re, self.im + o.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            o = QI.coerce(other)
            return QI(self.re - o.re, self.im - o.im)
        if isinstance(other, (float, complex)):
            return complex(self) - other
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return QI(other) - self
        if isinstance(other, (float, complex)):
            return other - complex(self)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            o = QI.coerce(other)
            return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            o = QI.coerce(other)
            den = o.re * o.re + o.im * o.im
            if den == 0:
                raise ZeroDivisionError("division by exact zero")
            num = self * o.conjugate()
            return QI(num.re / den, num.im / den)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QI(other) / self
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, k: int) -> "QI":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QI(1) / (self ** (-k))
        out = QI(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self) -> str:
        return f"QI({self.re!s}, {self.im!s})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*I"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*I)"


def exact(x) -> QI:
    """Convert ints, Fractions, floats (exactly) or complex numbers to :class:`QI`."""
    if isinstance(x, Complex) and not isinstance(x, (QI, Rational, float, complex)):
        x = complex(x)
    return QI.coerce(x)
