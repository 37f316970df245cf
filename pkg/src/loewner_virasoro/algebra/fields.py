"""Vector fields, momenta-linear functionals and one-forms on the coefficient body.

All objects here are truncated at ``n`` coefficients.  Brackets drop
everything that would land beyond slot ``n`` and record in ``trusted`` the
largest slot ``K`` such that slots ``1..K`` are unaffected by truncation
of the inputs.

Bracket convention
------------------
The Kirillov fields ``L_j`` come from the *right* action of
``z^{j+1} d/dz`` on ``f``, so their plain commutator is an
anti-homomorphism: ``L_m L_k - L_k L_m = (m-k) L_{m+k}``.
:func:`lie_bracket` returns ``B(A) - A(B)`` instead, which is the bracket
that satisfies the Witt relation ``{L_m, L_k} = (k-m) L_{m+k}`` and is
exactly the image of the canonical Poisson bracket of the dual
momenta-linear functionals.  :func:`commutator` gives the plain one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .polynomial import CoeffPolynomial


def _zero(n: int) -> CoeffPolynomial:
    return CoeffPolynomial.zero(n)


def _as_poly(x, n: int) -> CoeffPolynomial:
    if isinstance(x, CoeffPolynomial):
        if x.nvars != n:
            raise ValueError(f"component lives in a ring with {x.nvars} variables, expected {n}")
        return x
    return CoeffPolynomial.constant(x, n)


def _prefix_trust(ok: Sequence[bool]) -> int:
    k = 0
    for flag in ok:
        if not flag:
            break
        k += 1
    return k


@dataclass(frozen=True, eq=False)
class VectorFieldOnM:
    """``sum_j components[j-1] * d/dc_j`` for ``j = 1..n``."""

    components: tuple[CoeffPolynomial, ...]
    trusted: int = -1

    def __post_init__(self):
        n = len(self.components)
        comps = tuple(_as_poly(c, n) for c in self.components)
        object.__setattr__(self, "components", comps)
        if self.trusted < 0 or self.trusted > n:
            object.__setattr__(self, "trusted", n)

    @property
    def n(self) -> int:
        return len(self.components)

    def __getitem__(self, j: int) -> CoeffPolynomial:
        """Component multiplying ``d/dc_j`` (1-based)."""
        return self.components[j - 1]

    def apply(self, p: CoeffPolynomial) -> CoeffPolynomial:
        """Directional derivative of a polynomial along the field."""
        out = _zero(self.n)
        for j in p.variables():
            a = self.components[j - 1]
            if not a.is_zero():
                out = out + a * p.diff(j)
        return out

    def evaluate(self, c: Sequence[complex]) -> list[complex]:
        return [comp.evaluate(c) for comp in self.components]

    def __add__(self, other: "VectorFieldOnM") -> "VectorFieldOnM":
        return VectorFieldOnM(
            tuple(a + b for a, b in zip(self.components, other.components)),
            min(self.trusted, other.trusted),
        )

    def __sub__(self, other: "VectorFieldOnM") -> "VectorFieldOnM":
        return self + other.scale(-1)

    def scale(self, s) -> "VectorFieldOnM":
        return VectorFieldOnM(tuple(c * s for c in self.components), self.trusted)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorFieldOnM):
            return NotImplemented
        return self.components == other.components

    def equal_on_trusted(self, other: "VectorFieldOnM") -> bool:
        k = min(self.trusted, other.trusted)
        return self.components[:k] == other.components[:k]

    def is_zero(self, upto: int | None = None) -> bool:
        k = self.n if upto is None else upto
        return all(c.is_zero() for c in self.components[:k])

    def __str__(self) -> str:
        parts = []
        for j, comp in enumerate(self.components, start=1):
            if comp.is_zero():
                continue
            if comp == 1:
                parts.append(f"d{j}")
            else:
                parts.append(f"({comp})*d{j}")
        return " + ".join(parts) if parts else "0"


def kirillov_field(j: int, n: int) -> VectorFieldOnM:
    """Truncated Kirillov operator ``L_j = d_j + sum_k (k+1) c_k d_{j+k}``."""
    if not 1 <= j <= n:
        raise ValueError(f"kirillov_field: index j={j} outside 1..{n}")
    comps = [_zero(n) for _ in range(n)]
    comps[j - 1] = CoeffPolynomial.constant(1, n)
    for k in range(1, n - j + 1):
        comps[j + k - 1] = CoeffPolynomial.variable(k, n) * (k + 1)
    return VectorFieldOnM(tuple(comps))


def _bracket_trust(a: Sequence[CoeffPolynomial], ta: int,
                   b: Sequence[CoeffPolynomial], tb: int) -> int:
    ok = []
    for s in range(len(a)):
        good = s + 1 <= min(ta, tb)
        good = good and all(m <= tb for m in a[s].variables())
        good = good and all(m <= ta for m in b[s].variables())
        ok.append(good)
    return _prefix_trust(ok)


def lie_bracket(A: VectorFieldOnM, B: VectorFieldOnM) -> VectorFieldOnM:
    """Witt-convention bracket ``B(A) - A(B)``, component-wise."""
    if A.n != B.n:
        raise ValueError("lie_bracket: fields truncated at different n")
    comps = tuple(B.apply(a) - A.apply(b) for a, b in zip(A.components, B.components))
    trust = _bracket_trust(A.components, A.trusted, B.components, B.trusted)
    return VectorFieldOnM(comps, trust)


def commutator(A: VectorFieldOnM, B: VectorFieldOnM) -> VectorFieldOnM:
    """Plain commutator ``A(B) - B(A)`` of derivations."""
    return lie_bracket(B, A)


# --------------------------------------------------------------------------
# Momenta-linear functionals


@dataclass(frozen=True, eq=False)
class CovariantFunctional:
    """``sum_k coeffs[k-1] * psibar_k`` plus optional non-positive-index entries.

    ``extra`` maps indices ``0, -1, -2, ...`` to the polynomial multiplying
    ``psibar_0, psibar_{-1}, ...``; these momenta have no conjugate
    coordinate on the truncated body and only appear in intermediate
    objects of the negative-generator construction.
    """

    coeffs: tuple[CoeffPolynomial, ...]
    extra: Mapping[int, CoeffPolynomial] = field(default_factory=dict)
    trusted: int = -1

    def __post_init__(self):
        n = len(self.coeffs)
        object.__setattr__(self, "coeffs", tuple(_as_poly(c, n) for c in self.coeffs))
        ext = {}
        for k, v in dict(self.extra).items():
            if k > 0:
                raise ValueError("extra entries are for psibar_k with k <= 0")
            p = _as_poly(v, n)
            if not p.is_zero():
                ext[k] = p
        object.__setattr__(self, "extra", ext)
        if self.trusted < 0 or self.trusted > n:
            object.__setattr__(self, "trusted", n)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def momentum(cls, k: int, n: int) -> "CovariantFunctional":
        """The coordinate functional ``psibar_k`` (``k`` may be <= 0)."""
        zero = [_zero(n) for _ in range(n)]
        one = CoeffPolynomial.constant(1, n)
        if k >= 1:
            zero[k - 1] = one
            return cls(tuple(zero))
        return cls(tuple(zero), {k: one})

    @classmethod
    def dual_of(cls, X: VectorFieldOnM) -> "CovariantFunctional":
        return cls(X.components, {}, X.trusted)

    def dual_field(self) -> VectorFieldOnM:
        if self.extra:
            raise ValueError("functional has psibar_k entries with k <= 0; no dual field on M_n")
        return VectorFieldOnM(self.coeffs, self.trusted)

    def entry(self, k: int) -> CoeffPolynomial:
        if k >= 1:
            return self.coeffs[k - 1]
        return self.extra.get(k, _zero(self.n))

    def keys(self) -> list[int]:
        return sorted(self.extra) + list(range(1, self.n + 1))

    def diff_c(self, m: int) -> "CovariantFunctional":
        """Partial derivative with respect to ``c_m`` (still momenta-linear)."""
        return CovariantFunctional(
            tuple(c.diff(m) for c in self.coeffs),
            {k: v.diff(m) for k, v in self.extra.items()},
            self.trusted,
        )

    def __add__(self, other: "CovariantFunctional") -> "CovariantFunctional":
        if not isinstance(other, CovariantFunctional):
            return NotImplemented
        ext = dict(self.extra)
        for k, v in other.extra.items():
            ext[k] = ext.get(k, _zero(self.n)) + v
        return CovariantFunctional(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            ext,
            min(self.trusted, other.trusted),
        )

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s) -> "CovariantFunctional":
        """Multiply by a scalar or a polynomial in ``c``."""
        return CovariantFunctional(
            tuple(c * s for c in self.coeffs),
            {k: v * s for k, v in self.extra.items()},
            self.trusted,
        )

    __rmul__ = __mul__

    def __truediv__(self, s) -> "CovariantFunctional":
        return CovariantFunctional(
            tuple(c / s for c in self.coeffs),
            {k: v / s for k, v in self.extra.items()},
            self.trusted,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, CovariantFunctional):
            return NotImplemented
        return self.coeffs == other.coeffs and self.extra == other.extra

    def equal_on_trusted(self, other: "CovariantFunctional") -> bool:
        k = min(self.trusted, other.trusted)
        return self.coeffs[:k] == other.coeffs[:k] and self.extra == other.extra

    def with_trusted(self, k: int) -> "CovariantFunctional":
        return CovariantFunctional(self.coeffs, self.extra, min(k, self.trusted))

    def evaluate(self, c: Sequence[complex], psibar: Sequence[complex]) -> complex:
        return sum(coef.evaluate(c) * psibar[k] for k, coef in enumerate(self.coeffs))

    def __str__(self) -> str:
        parts = []
        for k in self.keys():
            p = self.entry(k)
            if p.is_zero():
                continue
            name = f"psibar{k}" if k >= 0 else f"psibar({k})"
            parts.append(name if p == 1 else f"({p})*{name}")
        return " + ".join(parts) if parts else "0"


def poisson_bracket(F: CovariantFunctional, G: CovariantFunctional) -> CovariantFunctional:
    """Canonical bracket ``sum_m dF/dc_m dG/dpsibar_m - dF/dpsibar_m dG/dc_m``."""
    if F.n != G.n:
        raise ValueError("poisson_bracket: functionals truncated at different n")
    n = F.n
    total = CovariantFunctional(tuple(_zero(n) for _ in range(n)))
    for m in range(1, n + 1):
        gm, fm = G.entry(m), F.entry(m)
        if not gm.is_zero():
            total = total + F.diff_c(m) * gm
        if not fm.is_zero():
            total = total - G.diff_c(m) * fm
    a = list(F.coeffs)
    b = list(G.coeffs)
    trust = _bracket_trust(a, F.trusted, b, G.trusted)
    for k in set(F.extra) | set(G.extra):
        # extra entries never carry truncated slots but may read them
        if any(m > G.trusted for m in F.entry(k).variables()) or any(
            m > F.trusted for m in G.entry(k).variables()
        ):
            trust = 0
    return total.with_trusted(trust) if trust < total.trusted else total


# --------------------------------------------------------------------------
# One-forms


@dataclass(frozen=True, eq=False)
class OneForm:
    """``sum_k coeffs[k-1] * dc_k``."""

    coeffs: tuple[CoeffPolynomial, ...]

    def __post_init__(self):
        n = len(self.coeffs)
        object.__setattr__(self, "coeffs", tuple(_as_poly(c, n) for c in self.coeffs))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def basis(cls, k: int, n: int) -> "OneForm":
        comps = [_zero(n) for _ in range(n)]
        comps[k - 1] = CoeffPolynomial.constant(1, n)
        return cls(tuple(comps))

    def pair(self, X: VectorFieldOnM) -> CoeffPolynomial:
        out = _zero(self.n)
        for a, b in zip(self.coeffs, X.components):
            if not a.is_zero() and not b.is_zero():
                out = out + a * b
        return out

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, s) -> "OneForm":
        return OneForm(tuple(c * s for c in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __str__(self) -> str:
        parts = []
        for k, p in enumerate(self.coeffs, start=1):
            if p.is_zero():
                continue
            parts.append(f"dc{k}" if p == 1 else f"({p})*dc{k}")
        return " + ".join(parts) if parts else "0"
