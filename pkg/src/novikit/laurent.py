"""Laurent polynomials in y_1..y_n with NovikovSeries coefficients.

Monomials are integer exponent vectors; coefficients are exact (or
precision-carrying) series.  This is the ambient ring for superpotentials:
finitely many monomials, no zero coefficients stored.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FieldMismatch
from .series import NovikovSeries


class NovikovLaurentPoly:
    """Map from exponent vectors (tuples of ints) to NovikovSeries."""

    __slots__ = ("field", "nvars", "monomials")

    def __init__(self, field, nvars: int, monomials=()):
        self.field = field
        self.nvars = nvars
        acc: dict = {}
        items = monomials.items() if isinstance(monomials, dict) else monomials
        for a, coeff in items:
            a = tuple(int(x) for x in a)
            if len(a) != nvars:
                raise ValueError(f"exponent vector {a} has wrong arity")
            if a in acc:
                acc[a] = acc[a] + coeff
            else:
                acc[a] = coeff
        self.monomials = {a: c for a, c in acc.items() if c.terms or c.precision is not None}

    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars)

    def items(self):
        return sorted(self.monomials.items())

    def __add__(self, other):
        if not isinstance(other, NovikovLaurentPoly):
            return NotImplemented
        if other.field != self.field or other.nvars != self.nvars:
            raise FieldMismatch("laurent operands disagree")
        out = dict(self.monomials)
        for a, c in other.monomials.items():
            out[a] = out[a] + c if a in out else c
        return NovikovLaurentPoly(self.field, self.nvars, out)

    def __neg__(self):
        return NovikovLaurentPoly(
            self.field, self.nvars, {a: -c for a, c in self.monomials.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, NovikovLaurentPoly):
            return NotImplemented
        out: dict = {}
        for a, c in self.monomials.items():
            for b, d in other.monomials.items():
                key = tuple(x + y for x, y in zip(a, b))
                prod = c * d
                out[key] = out[key] + prod if key in out else prod
        return NovikovLaurentPoly(self.field, self.nvars, out)

    def log_derivative(self, i: int) -> "NovikovLaurentPoly":
        """y_i d/dy_i: multiplies each coefficient by the i-th exponent."""
        out = {}
        for a, c in self.monomials.items():
            if a[i] != 0:
                out[a] = c.scale(c.field.from_int(a[i]))
        return NovikovLaurentPoly(self.field, self.nvars, out)

    def log_derivatives(self):
        return [self.log_derivative(i) for i in range(self.nvars)]

    def substitute_fiber(self, u) -> "NovikovLaurentPoly":
        """y_i -> T^{u_i} y_i: shifts each coefficient by <a, u>."""
        u = [Fraction(x) for x in u]
        out = {}
        for a, c in self.monomials.items():
            shift = sum((Fraction(e) * x for e, x in zip(a, u)), Fraction(0))
            out[a] = c.shift(shift)
        return NovikovLaurentPoly(self.field, self.nvars, out)

    def evaluate(self, point, work_prec) -> NovikovSeries:
        """Value at a point with nonzero series coordinates.

        ``work_prec`` bounds the T-adic precision used for the coordinate
        inverses; the result's own precision field stays honest.
        """
        work_prec = Fraction(work_prec)
        inverses = {}
        total = NovikovSeries.zero(self.field)
        for a, c in self.monomials.items():
            term = c
            for i, e in enumerate(a):
                if e == 0:
                    continue
                if e > 0:
                    term = term * (point[i] ** e)
                else:
                    if i not in inverses:
                        inverses[i] = point[i].invert(work_prec)
                    term = term * (inverses[i] ** (-e))
            total = total + term
        return total

    def map_coeffs(self, fn, field) -> "NovikovLaurentPoly":
        return NovikovLaurentPoly(
            field, self.nvars, {a: c.map_coeffs(fn, field) for a, c in self.monomials.items()}
        )

    def __repr__(self):
        if not self.monomials:
            return "0"
        parts = []
        for a, c in self.items():
            mono = "*".join(
                f"y{i+1}^{e}" if e != 1 else f"y{i+1}" for i, e in enumerate(a) if e != 0
            )
            parts.append(f"({c!r})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def log_derivatives(W: NovikovLaurentPoly):
    """The system y_i dW/dy_i, one Laurent polynomial per variable."""
    return W.log_derivatives()
