"""Truncated Laurent series in the section coefficients.

A series lives in n variables a_0..a_{n-1}, polynomially extended by a
second copy b_0..b_{n-1}.  One distinguished index i0 (the coefficient of
the interior monomial) is the only position allowed to carry negative
exponents; every expansion we build is a power series in the remaining
variables divided by a power of a_{i0}.

The *expansion index* of a term is its total degree in the non-distinguished
a-variables.  `truncation` is the largest expansion index guaranteed to be
complete and exact: terms beyond it are discarded rather than stored as
unverified zeros.  `truncation=None` marks a series that is exact at every
order (for instance, a Laurent polynomial).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .exact import FamilyError, Rat, SparsePoly, as_rat, grlex_key

TermKey = tuple[tuple[int, ...], tuple[int, ...]]

_ZERO = Fraction(0)


class LaurentSeries:
    __slots__ = ("n", "i0", "terms", "truncation")

    def __init__(self, n: int, i0: int,
                 terms: Mapping[TermKey, int | str | Rat] | None = None,
                 truncation: int | None = None):
        if not 0 <= i0 < n:
            raise ValueError(f"distinguished index {i0} out of range for n={n}")
        canonical: dict[TermKey, Rat] = {}
        for (a_exp, b_exp), coeff in (terms or {}).items():
            a_key = tuple(int(e) for e in a_exp)
            b_key = tuple(int(e) for e in b_exp)
            if len(a_key) != n or len(b_key) != n:
                raise ValueError("exponent length does not match n")
            if any(e < 0 for i, e in enumerate(a_key) if i != i0):
                raise ValueError(
                    f"negative exponent outside the distinguished index: {a_key}")
            if any(e < 0 for e in b_key):
                raise ValueError(f"negative b-exponent: {b_key}")
            if truncation is not None and _index(a_key, i0) > truncation:
                continue
            key = (a_key, b_key)
            value = canonical.get(key, _ZERO) + as_rat(coeff)
            if value:
                canonical[key] = value
            elif key in canonical:
                del canonical[key]
        self.n = n
        self.i0 = i0
        self.terms = canonical
        self.truncation = truncation

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, i0: int = 0,
             truncation: int | None = None) -> "LaurentSeries":
        return cls(n, i0, {}, truncation)

    @classmethod
    def from_poly(cls, poly: SparsePoly, i0: int = 0) -> "LaurentSeries":
        """Lift a polynomial in the "a" or "b" family to an exact series."""
        n = poly.arity
        zero_exp = (0,) * n
        if poly.family == "a":
            terms = {(exp, zero_exp): c for exp, c in poly.terms.items()}
        elif poly.family == "b":
            terms = {(zero_exp, exp): c for exp, c in poly.terms.items()}
        else:
            raise FamilyError(
                f"cannot view a {poly.family!r}-family polynomial as a series "
                "in the section coefficients")
        return cls(n, i0, terms, truncation=None)

    # -- structure ----------------------------------------------------------

    def index_of(self, a_exp: Sequence[int]) -> int:
        return _index(tuple(a_exp), self.i0)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[TermKey, Rat]]:
        return sorted(
            self.terms.items(),
            key=lambda kv: (grlex_key(kv[0][1]), _index(kv[0][0], self.i0),
                            grlex_key(kv[0][0])))

    def b_degrees(self) -> set[int]:
        return {sum(b) for _, b in self.terms}

    def b_degree(self) -> int | None:
        """Common b-degree of all terms; None when zero, error when mixed."""
        degrees = self.b_degrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError(f"mixed b-degrees {sorted(degrees)}")
        return degrees.pop()

    def a_degrees(self) -> set[int]:
        return {sum(a) for a, _ in self.terms}

    def is_a_homogeneous(self, degree: int) -> bool:
        return all(sum(a) == degree for a, _ in self.terms)

    def max_index(self) -> int | None:
        if not self.terms:
            return None
        return max(_index(a, self.i0) for a, _ in self.terms)

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other: "LaurentSeries"):
        if self.n != other.n or self.i0 != other.i0:
            raise ValueError("series shapes differ (n or distinguished index)")

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check_compatible(other)
        trunc = _min_trunc(self.truncation, other.truncation)
        merged = dict(self.terms)
        for key, coeff in other.terms.items():
            value = merged.get(key, _ZERO) + coeff
            if value:
                merged[key] = value
            elif key in merged:
                del merged[key]
        return LaurentSeries(self.n, self.i0, merged, trunc)

    def __neg__(self) -> "LaurentSeries":
        return self.scale(-1)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def scale(self, value: int | Rat) -> "LaurentSeries":
        value = as_rat(value)
        if not value:
            return LaurentSeries.zero(self.n, self.i0, self.truncation)
        out = LaurentSeries.__new__(LaurentSeries)
        out.n, out.i0, out.truncation = self.n, self.i0, self.truncation
        out.terms = {k: c * value for k, c in self.terms.items()}
        return out

    def __mul__(self, value):
        if isinstance(value, (int, Fraction)):
            return self.scale(value)
        return NotImplemented

    __rmul__ = __mul__

    def derivative_a(self, index: int) -> "LaurentSeries":
        """Termwise d/da_index.

        The truncation frontier drops by one unless the distinguished
        variable is differentiated, which leaves expansion indices alone.
        """
        if not 0 <= index < self.n:
            raise ValueError(f"index {index} out of range")
        out: dict[TermKey, Rat] = {}
        for (a_exp, b_exp), coeff in self.terms.items():
            e = a_exp[index]
            if e == 0:
                continue
            new_a = a_exp[:index] + (e - 1,) + a_exp[index + 1:]
            key = (new_a, b_exp)
            value = out.get(key, _ZERO) + coeff * e
            if value:
                out[key] = value
            elif key in out:
                del out[key]
        trunc = self.truncation
        if trunc is not None and index != self.i0:
            trunc -= 1
        return LaurentSeries(self.n, self.i0, out, trunc)

    def mul_b_monomial(self, b_exp: Sequence[int]) -> "LaurentSeries":
        shift = tuple(int(e) for e in b_exp)
        if len(shift) != self.n or any(e < 0 for e in shift):
            raise ValueError(f"bad b-monomial exponent {shift}")
        out = {
            (a, tuple(u + v for u, v in zip(b, shift))): c
            for (a, b), c in self.terms.items()}
        return LaurentSeries(self.n, self.i0, out, self.truncation)

    def b_coefficient(self, b_exp: Sequence[int]) -> "LaurentSeries":
        """Series multiplying the given b-monomial (b-part of the keys zeroed)."""
        target = tuple(int(e) for e in b_exp)
        zero_exp = (0,) * self.n
        out = {
            (a, zero_exp): c
            for (a, b), c in self.terms.items() if b == target}
        return LaurentSeries(self.n, self.i0, out, self.truncation)

    def substitute_b(self, point: Sequence[int | Rat]) -> "LaurentSeries":
        """Specialize the b-variables at an exact rational point."""
        coords = [as_rat(v) for v in point]
        if len(coords) != self.n:
            raise ValueError("point length does not match n")
        zero_exp = (0,) * self.n
        out: dict[TermKey, Rat] = {}
        for (a_exp, b_exp), coeff in self.terms.items():
            factor = coeff
            for value, e in zip(coords, b_exp):
                if e:
                    factor *= value ** e
            if not factor:
                continue
            key = (a_exp, zero_exp)
            total = out.get(key, _ZERO) + factor
            if total:
                out[key] = total
            elif key in out:
                del out[key]
        return LaurentSeries(self.n, self.i0, out, self.truncation)

    def pruned_to(self, truncation: int | None) -> "LaurentSeries":
        return LaurentSeries(self.n, self.i0, self.terms,
                             _min_trunc(self.truncation, truncation))

    def __eq__(self, other):
        return (isinstance(other, LaurentSeries)
                and self.n == other.n and self.i0 == other.i0
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, self.i0, frozenset(self.terms.items())))

    def __repr__(self):
        return (f"LaurentSeries(n={self.n}, i0={self.i0}, "
                f"terms={len(self.terms)}, truncation={self.truncation})")


def _index(a_exp: tuple[int, ...], i0: int) -> int:
    return sum(a_exp) - a_exp[i0]


def _min_trunc(left: int | None, right: int | None) -> int | None:
    if left is None:
        return right
    if right is None:
        return left
    return min(left, right)
