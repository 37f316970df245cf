"""Sparse multivariate polynomials with exact Gaussian-rational coefficients.

Variables are numbered 1..nvars.  By default variable ``k`` is the
coefficient ``c_k`` of a normalized univalent function and carries weight
``k``; other uses (momenta, velocities, the geodesic parameter) pass their
own names for printing.
"""

from __future__ import annotations

from numbers import Number
from typing import Mapping, Sequence

from .exact import QI, exact

Monomial = tuple[int, ...]
_SCALARS = (Number, QI)


def _default_name(k: int) -> str:
    return f"c{k}"


class CoeffPolynomial:
    """Polynomial in ``nvars`` variables, stored as ``{exponents: coefficient}``.

    Zero coefficients are never stored, so ``p.terms == {}`` is the zero
    polynomial.  Instances are treated as immutable.
    """

    __slots__ = ("terms", "nvars", "names")

    def __init__(
        self,
        terms: Mapping[Monomial, object] | None = None,
        nvars: int = 0,
        names: Sequence[str] | None = None,
    ):
        clean: dict[Monomial, QI] = {}
        for mono, coef in (terms or {}).items():
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} does not have {nvars} exponents")
            q = exact(coef)
            if q != 0:
                clean[tuple(mono)] = q
        self.terms = clean
        self.nvars = nvars
        self.names = tuple(names) if names is not None else None

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value, nvars: int, names=None) -> "CoeffPolynomial":
        return cls({(0,) * nvars: value}, nvars, names)

    @classmethod
    def zero(cls, nvars: int, names=None) -> "CoeffPolynomial":
        return cls({}, nvars, names)

    @classmethod
    def variable(cls, k: int, nvars: int, names=None) -> "CoeffPolynomial":
        if not 1 <= k <= nvars:
            raise ValueError(f"variable index {k} outside 1..{nvars}")
        mono = [0] * nvars
        mono[k - 1] = 1
        return cls({tuple(mono): 1}, nvars, names)

    def _like(self, terms: dict) -> "CoeffPolynomial":
        out = CoeffPolynomial.__new__(CoeffPolynomial)
        out.terms = {m: c for m, c in terms.items() if c != 0}
        out.nvars = self.nvars
        out.names = self.names
        return out

    def _coerce(self, other) -> "CoeffPolynomial":
        if isinstance(other, CoeffPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in rings with different variable counts")
            return other
        return CoeffPolynomial.constant(other, self.nvars, self.names)

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> QI:
        return self.terms.get((0,) * self.nvars, QI(0))

    def variables(self) -> set[int]:
        """1-based indices of variables that actually occur."""
        used = set()
        for mono in self.terms:
            used.update(i + 1 for i, e in enumerate(mono) if e)
        return used

    def weight(self, mono: Monomial) -> int:
        return sum((i + 1) * e for i, e in enumerate(mono))

    def weighted_degrees(self) -> set[int]:
        return {self.weight(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.weighted_degrees()) <= 1

    def degree(self, k: int | None = None) -> int:
        """Total degree, or the degree in variable ``k`` when given."""
        if not self.terms:
            return -1
        if k is None:
            return max(sum(m) for m in self.terms)
        return max(m[k - 1] for m in self.terms)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, (CoeffPolynomial, *_SCALARS)):
            return NotImplemented
        o = self._coerce(other)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (CoeffPolynomial, *_SCALARS)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            q = exact(other)
            return self._like({m: c * q for m, c in self.terms.items()})
        if not isinstance(other, CoeffPolynomial):
            return NotImplemented
        o = self._coerce(other)
        out: dict[Monomial, QI] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return self._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CoeffPolynomial):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("only division by non-zero constants is supported")
            other = other.constant_term()
        q = exact(other)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return self._like({m: c / q for m, c in self.terms.items()})

    def __rtruediv__(self, other):
        if not self.is_constant() or self.is_zero():
            raise ZeroDivisionError("only non-zero constant polynomials are invertible")
        return CoeffPolynomial.constant(exact(other) / self.constant_term(), self.nvars, self.names)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = CoeffPolynomial.constant(1, self.nvars, self.names)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, CoeffPolynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, _SCALARS):
            if other == 0:
                return not self.terms
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- calculus and substitution ----------------------------------------

    def diff(self, k: int) -> "CoeffPolynomial":
        """Partial derivative with respect to variable ``k`` (1-based)."""
        i = k - 1
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                out[tuple(mm)] = c * e
        return self._like(out)

    def integrate(self, k: int) -> "CoeffPolynomial":
        """Antiderivative in variable ``k`` vanishing at ``x_k = 0``."""
        i = k - 1
        out = {}
        for m, c in self.terms.items():
            mm = list(m)
            mm[i] += 1
            out[tuple(mm)] = c / (m[i] + 1)
        return self._like(out)

    def conjugate_coefficients(self) -> "CoeffPolynomial":
        return self._like({m: c.conjugate() for m, c in self.terms.items()})

    def permute(self, perm: Sequence[int], names=None) -> "CoeffPolynomial":
        """Rename variable ``k`` to ``perm[k-1]`` (a 1-based permutation)."""
        out = {}
        for m, c in self.terms.items():
            mm = [0] * self.nvars
            for i, e in enumerate(m):
                mm[perm[i] - 1] = e
            out[tuple(mm)] = c
        res = self._like(out)
        if names is not None:
            res.names = tuple(names)
        return res

    def embed(self, nvars: int, offset: int = 0, names=None) -> "CoeffPolynomial":
        """Same polynomial in a ring with more variables (shifted by ``offset``)."""
        if offset + self.nvars > nvars:
            raise ValueError("target ring is too small")
        out = {}
        for m, c in self.terms.items():
            mm = [0] * nvars
            mm[offset : offset + self.nvars] = m
            out[tuple(mm)] = c
        return CoeffPolynomial(out, nvars, names)

    def evaluate(self, values: Sequence) -> complex:
        """Numeric value at ``values`` (``values[k-1]`` substitutes variable k)."""
        if len(values) < self.nvars:
            values = list(values) + [0] * (self.nvars - len(values))
        total = 0j
        for m, c in self.terms.items():
            term = complex(c)
            for i, e in enumerate(m):
                if e:
                    term *= values[i] ** e
            total += term
        return total

    def evaluate_exact(self, values: Sequence) -> QI:
        total = QI(0)
        for m, c in self.terms.items():
            term = c
            for i, e in enumerate(m):
                if e:
                    term = term * exact(values[i]) ** e
            total = total + term
        return total

    # -- printing ---------------------------------------------------------

    def _name(self, k: int) -> str:
        if self.names is not None:
            return self.names[k - 1]
        return _default_name(k)

    def sorted_terms(self) -> list[tuple[Monomial, QI]]:
        """Terms in canonical order: by weighted degree, then lexicographic."""
        return sorted(
            self.terms.items(),
            key=lambda mc: (self.weight(mc[0]), tuple(-e for e in mc[0])),
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coef in self.sorted_terms():
            factors = []
            for i, e in enumerate(mono):
                if e == 1:
                    factors.append(self._name(i + 1))
                elif e > 1:
                    factors.append(f"{self._name(i + 1)}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(body)
            elif coef == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{coef}*{body}")
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"CoeffPolynomial({self})"


def poly_ring(nvars: int, names: Sequence[str] | None = None):
    """Return ``(var, const)`` helpers for a ring with ``nvars`` variables."""

    def var(k: int) -> CoeffPolynomial:
        return CoeffPolynomial.variable(k, nvars, names)

    def const(v) -> CoeffPolynomial:
        return CoeffPolynomial.constant(v, nvars, names)

    return var, const
