"""Formal series over the upward Novikov field, with exact rational exponents.

A ``NovikovSeries`` is a finite, sorted list of (exponent, coefficient) pairs
together with a precision horizon: terms with exponent below the horizon are
exact, everything at or above it is O(T^precision).  ``precision=None`` means
the series is exact (all of it is stored).  Coefficients live in one of the
fields from :mod:`novikit.fields`; exponents are Fractions.

The valuation v(s) is the least exponent carrying a nonzero coefficient, with
v(0) = +infinity.  Precision propagation is pessimistic: sums take the min of
the horizons, products use min(v(s)+prec(t), v(t)+prec(s)), and no operation
silently claims exactness it cannot certify.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DenominatorDivisibleByP,
    FieldMismatch,
    IndeterminateValuation,
    NotInvertible,
)
from . import fields as flds

INF = float("inf")


def _exp(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class NovikovSeries:
    """Truncated formal series sum a_i T^{g_i} over a coefficient field."""

    __slots__ = ("field", "terms", "precision")

    def __init__(self, field, terms=(), precision=None):
        self.field = field
        prec = None if precision is None else _exp(precision)
        merged: dict = {}
        for g, c in terms:
            g = _exp(g)
            if prec is not None and g >= prec:
                continue
            if g in merged:
                merged[g] = merged[g] + c
            else:
                merged[g] = c
        self.terms = tuple(
            (g, merged[g]) for g in sorted(merged) if merged[g] != field.zero
        )
        self.precision = prec

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, ((Fraction(0), field.one),))

    @classmethod
    def monomial(cls, field, exponent, coeff=None):
        c = field.one if coeff is None else coeff
        return cls(field, ((_exp(exponent), c),))

    @classmethod
    def from_int(cls, field, n: int):
        return cls(field, ((Fraction(0), field.from_int(n)),))

    # -- basic queries --------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    def is_zero(self) -> bool:
        """True when the series is exactly zero (requires exactness)."""
        return not self.terms and self.precision is None

    def valuation(self):
        """Least exponent with nonzero coefficient; +inf for the zero series.

        Raises IndeterminateValuation when nothing is stored but the series
        is only known modulo T^precision.
        """
        if self.terms:
            return self.terms[0][0]
        if self.precision is None:
            return INF
        raise IndeterminateValuation(
            f"series is O(T^{self.precision}) with no resolved term"
        )

    def valuation_lower_bound(self):
        """v(s) if resolved, else the precision horizon (a certified bound)."""
        if self.terms:
            return self.terms[0][0]
        return INF if self.precision is None else self.precision

    def leading(self):
        """(exponent, coefficient) of the lowest term."""
        if not self.terms:
            raise IndeterminateValuation("zero or unresolved series has no leading term")
        return self.terms[0]

    def coeff_at(self, g):
        g = _exp(g)
        for e, c in self.terms:
            if e == g:
                return c
            if e > g:
                break
        return self.field.zero

    def max_exponent(self):
        return self.terms[-1][0] if self.terms else None

    def exponent_denominator_lcm(self) -> int:
        out = 1
        for g, _ in self.terms:
            d = g.denominator
            out = out * d // _gcd(out, d)
        return out

    # -- arithmetic -----------------------------------------------------------

    def _check_field(self, other: "NovikovSeries"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        if isinstance(other, int):
            other = NovikovSeries.from_int(self.field, other)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        self._check_field(other)
        prec = _min_prec(self.precision, other.precision)
        return NovikovSeries(self.field, self.terms + other.terms, prec)

    __radd__ = __add__

    def __neg__(self):
        out = NovikovSeries.__new__(NovikovSeries)
        out.field = self.field
        out.terms = tuple((g, -c) for g, c in self.terms)
        out.precision = self.precision
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = NovikovSeries.from_int(self.field, other)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, int):
            return NovikovSeries.from_int(self.field, other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            other = NovikovSeries.from_int(self.field, other)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        self._check_field(other)
        prec = _mul_prec(self, other)
        acc: dict = {}
        for g1, c1 in self.terms:
            for g2, c2 in other.terms:
                g = g1 + g2
                if prec is not None and g >= prec:
                    continue
                if g in acc:
                    acc[g] = acc[g] + c1 * c2
                else:
                    acc[g] = c1 * c2
        return NovikovSeries(self.field, acc.items(), prec)

    __rmul__ = __mul__

    def scale(self, c):
        """Multiply by a field element."""
        if c == self.field.zero:
            return NovikovSeries(self.field, (), self.precision)
        return NovikovSeries(
            self.field, tuple((g, c * a) for g, a in self.terms), self.precision
        )

    def shift(self, g):
        """Multiply by T^g."""
        g = _exp(g)
        prec = None if self.precision is None else self.precision + g
        out = NovikovSeries.__new__(NovikovSeries)
        out.field = self.field
        out.terms = tuple((e + g, c) for e, c in self.terms)
        out.precision = prec
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = NovikovSeries.from_int(self.field, other)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return (
            self.field == other.field
            and self.terms == other.terms
            and self.precision == other.precision
        )

    def __hash__(self):
        return hash((len(self.terms), self.precision))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use invert() for negative powers")
        out = NovikovSeries.one(self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    # -- the operations of the module contract --------------------------------

    def truncate(self, Z) -> "NovikovSeries":
        """Keep exactly the terms with exponent <= Z.

        The result is exact when Z is below this series' horizon (the dropped
        tail was known); when Z reaches past the horizon the stored terms are
        all we know and the horizon is preserved.
        """
        Z = _exp(Z)
        if self.precision is not None and Z >= self.precision:
            return self
        kept = tuple((g, c) for g, c in self.terms if g <= Z)
        out = NovikovSeries.__new__(NovikovSeries)
        out.field = self.field
        out.terms = kept
        out.precision = None
        return out

    def with_precision(self, Z) -> "NovikovSeries":
        """Forget terms at or above Z and record the horizon Z."""
        Z = _exp(Z)
        if self.precision is not None and self.precision <= Z:
            return self
        return NovikovSeries(self.field, self.terms, Z)

    def resolved_part(self) -> "NovikovSeries":
        """The stored terms as an exact finite series (drops the horizon)."""
        if self.precision is None:
            return self
        out = NovikovSeries.__new__(NovikovSeries)
        out.field = self.field
        out.terms = self.terms
        out.precision = None
        return out

    def invert(self, target_precision) -> "NovikovSeries":
        """Multiplicative inverse r with s*r = 1 + O(T^{target - v(s)}).

        Exact for monomials; otherwise computed by Newton doubling of the
        normalized tail, so the result carries precision target - 2 v(s).
        """
        if not self.terms:
            raise NotInvertible("cannot invert the zero (or unresolved-zero) series")
        v, lead = self.terms[0]
        lead_inv = self.field.one / lead
        if len(self.terms) == 1 and self.precision is None:
            return NovikovSeries(self.field, ((-v, lead_inv),))
        target = _exp(target_precision)
        out_prec = target - 2 * v
        if out_prec <= -v:
            # nothing beyond the leading term is requested
            return NovikovSeries(self.field, ((-v, lead_inv),), out_prec)
        # normalized u = s * T^{-v} / lead = 1 + tail, invert by doubling
        u = self.shift(-v).scale(lead_inv).with_precision(target - v)
        r = NovikovSeries.one(self.field).with_precision(target - v)
        # r <- r*(2 - u*r) doubles the correct order each pass
        known = _tail_valuation(u)
        two = NovikovSeries.from_int(self.field, 2)
        guard = 0
        while known < target - v:
            r = (r * (two - u * r)).with_precision(target - v)
            known = known * 2
            guard += 1
            if guard > 64:
                raise NotInvertible("inversion failed to converge (degenerate tail)")
        return r.shift(-v).scale(lead_inv).with_precision(out_prec)

    def reduce_mod_p(self, p: int) -> "NovikovSeries":
        """Coefficientwise mod-p reduction; exponents unchanged.

        Requires every denominator prime to p.  The target field is the fixed
        residue field of this series' coefficient field.
        """
        tgt, fn = flds.residue_hom(self.field, p)
        try:
            terms = tuple((g, fn(c)) for g, c in self.terms)
        except flds.PrimeTooSmallInternal:
            raise DenominatorDivisibleByP(f"no residue embedding at p={p}")
        return NovikovSeries(tgt, terms, self.precision)

    def rescale_p(self, p: int) -> "NovikovSeries":
        """The substitution T -> T^{1/p}: every exponent g becomes g/p."""
        prec = None if self.precision is None else self.precision / p
        out = NovikovSeries.__new__(NovikovSeries)
        out.field = self.field
        out.terms = tuple((g / p, c) for g, c in self.terms)
        out.precision = prec
        return out

    def map_coeffs(self, fn, field) -> "NovikovSeries":
        return NovikovSeries(
            field, tuple((g, fn(c)) for g, c in self.terms), self.precision
        )

    def exact_div(self, other: "NovikovSeries") -> "NovikovSeries":
        """Exact quotient of exact series (used by fraction-free elimination).

        Long division from the lowest exponent; raises ValueError when the
        division does not terminate (the quotient is then not a finite series).
        """
        self._check_field(other)
        if self.precision is not None or other.precision is not None:
            raise ValueError("exact_div needs exact operands")
        if not other.terms:
            raise ZeroDivisionError("series division by zero")
        rem = dict(self.terms)
        out = []
        dv, dlead = other.terms[0]
        guard = len(self.terms) * max(1, len(other.terms)) * 8 + 64
        while rem:
            g = min(rem)
            c = rem.pop(g)
            if c == self.field.zero:
                continue
            q_exp = g - dv
            q_coeff = c / dlead
            out.append((q_exp, q_coeff))
            for e2, c2 in other.terms[1:]:
                tgt = q_exp + e2
                rem[tgt] = rem.get(tgt, self.field.zero) - q_coeff * c2
            guard -= 1
            if guard <= 0:
                raise ValueError("series division does not terminate")
        return NovikovSeries(self.field, out)

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for g, c in self.terms:
                if g == 0:
                    parts.append(f"{c!r}")
                elif g == 1:
                    parts.append(f"{c!r}*T")
                else:
                    parts.append(f"{c!r}*T^{g}")
            body = " + ".join(parts)
        if self.precision is not None:
            body += f" + O(T^{self.precision})"
        return body


def _tail_valuation(u: NovikovSeries):
    """Valuation of u - 1 (u assumed to start with 1)."""
    for g, _ in u.terms:
        if g > 0:
            return g
    return u.precision if u.precision is not None else INF


def _min_prec(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    return min(p1, p2)


def _mul_prec(s: NovikovSeries, t: NovikovSeries):
    cands = []
    if t.precision is not None:
        cands.append(s.valuation_lower_bound() + t.precision)
    if s.precision is not None:
        cands.append(t.valuation_lower_bound() + s.precision)
    cands = [c for c in cands if c != INF]
    if not cands:
        return None
    return min(cands)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# -- module-level spellings matching the operation names ----------------------

def valuation(s: NovikovSeries):
    return s.valuation()


def truncate(s: NovikovSeries, Z):
    return s.truncate(Z)


def invert(s: NovikovSeries, target_precision):
    return s.invert(target_precision)


def reduce_series_mod_p(s: NovikovSeries, p: int):
    return s.reduce_mod_p(p)


def rescale_p(s: NovikovSeries, p: int):
    return s.rescale_p(p)
