"""Coefficient fields: Q, Q(i), F_p, and explicit finite extensions.

Conventions
-----------
* Exact rationals are ``fractions.Fraction`` (always reduced, denominator
  positive), used both as field elements and as exponents elsewhere.
* Q(i) elements are ``GaussianRat`` pairs of Fractions.
* Algebraic closures are approximated by explicit extensions adjoined on
  demand: F_p[x]/(f) in characteristic p and Q(i)[x]/(f) in characteristic 0,
  with a total degree budget (default 8).
* All non-canonical choices (images of i mod p, images of adjoined generators)
  are pinned to the lexicographically smallest root of the relevant minimal
  polynomial, so every run of every prime makes the same choice.

Field handles expose ``zero``, ``one``, ``characteristic``, ``from_int`` and
compare equal structurally; elements support +, -, *, / and ==.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import (
    DenominatorDivisibleByP,
    FieldBudgetExceeded,
    FieldMismatch,
    ReduciblePolynomial,
)
from . import polys

DEFAULT_DEGREE_BUDGET = 8


# ---------------------------------------------------------------------------
# elementary number theory (desk scale, trial division throughout)
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorint(n: int) -> dict:
    """Prime factorization of |n| by trial division."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def sqrt_int(n: int):
    """Exact integer square root, or None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def sqrt_fraction(q: Fraction):
    """Exact rational square root, or None."""
    a = sqrt_int(q.numerator)
    b = sqrt_int(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussianRat:
    """Element of Q(i), stored as an exact (re, im) pair of Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRat(-self.re, -self.im)

    def __sub__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRat(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __eq__(self, other):
        other = _coerce_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conj(self):
        return GaussianRat(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_gaussian_integer(self) -> bool:
        return self.re.denominator == 1 and self.im.denominator == 1

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _coerce_gauss(x):
    if isinstance(x, GaussianRat):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRat(x, 0)
    return NotImplemented


# ---------------------------------------------------------------------------
# Gaussian integer factorization (for exact root extraction in Q(i))
# ---------------------------------------------------------------------------

def _gauss_divmod(a: GaussianRat, b: GaussianRat):
    """Nearest-integer division in Z[i]: a = q*b + r with N(r) < N(b)."""
    q = a / b
    qre = Fraction(round(q.re))
    qim = Fraction(round(q.im))
    qq = GaussianRat(qre, qim)
    return qq, a - qq * b


def _gauss_gcd(a: GaussianRat, b: GaussianRat) -> GaussianRat:
    while b.norm() != 0:
        _, r = _gauss_divmod(a, b)
        a, b = b, r
    return a


def _sqrt_minus_one_mod(p: int) -> int:
    """A square root of -1 mod p, p ≡ 1 (mod 4), by exhaustion (desk scale)."""
    for x in range(2, p):
        if (x * x + 1) % p == 0:
            return x
    raise ValueError(f"no sqrt(-1) mod {p}")


def gaussian_factor(z: GaussianRat) -> tuple:
    """Factor a nonzero Gaussian integer as (unit, {prime: exponent}).

    Primes are canonical representatives: 1+i for norm 2; for split p ≡ 1
    mod 4 the two conjugate primes normalized to first quadrant; inert
    rational primes q ≡ 3 mod 4 as themselves.
    """
    if not z.is_gaussian_integer() or z.norm() == 0:
        raise ValueError("gaussian_factor needs a nonzero Gaussian integer")
    n = int(z.norm())
    factors: dict = {}
    rest = z
    for p, e in sorted(factorint(n).items()):
        if p == 2:
            pi = GaussianRat(1, 1)
            while True:
                q, r = _gauss_divmod(rest, pi)
                if r.norm() != 0:
                    break
                rest = q
                factors[_canon_key(pi)] = factors.get(_canon_key(pi), 0) + 1
        elif p % 4 == 3:
            pi = GaussianRat(p, 0)
            while True:
                q, r = _gauss_divmod(rest, pi)
                if r.norm() != 0:
                    break
                rest = q
                factors[_canon_key(pi)] = factors.get(_canon_key(pi), 0) + 1
        else:
            s = _sqrt_minus_one_mod(p)
            pi = _gauss_gcd(GaussianRat(p, 0), GaussianRat(s, 1))
            for cand in (pi, pi.conj()):
                cand = _first_quadrant(cand)
                while True:
                    q, r = _gauss_divmod(rest, cand)
                    if r.norm() != 0:
                        break
                    rest = q
                    factors[_canon_key(cand)] = factors.get(_canon_key(cand), 0) + 1
    # what remains is a unit
    assert rest.norm() == 1, "factorization did not terminate at a unit"
    return rest, factors


def _first_quadrant(z: GaussianRat) -> GaussianRat:
    for _ in range(4):
        if z.re > 0 and z.im >= 0:
            return z
        z = z * GaussianRat(0, 1)
    return z


def _canon_key(z: GaussianRat):
    return (z.re, z.im)


_UNITS = [GaussianRat(1), GaussianRat(0, 1), GaussianRat(-1), GaussianRat(0, -1)]


def nth_roots_in_gaussian_rationals(c: GaussianRat, m: int) -> list:
    """All m-th roots of c that lie in Q(i) (possibly empty)."""
    if c.norm() == 0:
        return [GaussianRat(0)]
    # scale to a Gaussian integer: c = z / d with d a positive integer
    d = (c.re.denominator * c.im.denominator) // _gcd_int(
        c.re.denominator, c.im.denominator
    )
    z = c * GaussianRat(d ** m, 0)  # then root(z)/d is a root of c... only if
    # z is an integer; d^m * c is integral since d clears denominators
    unit, fac = gaussian_factor(z)
    root = GaussianRat(1)
    for key, e in fac.items():
        if e % m != 0:
            return []
        pi = GaussianRat(key[0], key[1])
        for _ in range(e // m):
            root = root * pi
    roots = []
    for u in _UNITS:
        upow = GaussianRat(1)
        for _ in range(m):
            upow = upow * u
        if upow == unit:
            base = (root * u) / GaussianRat(d, 0)
            # multiply by the m-th roots of unity inside Q(i)
            for w in _UNITS:
                wp = GaussianRat(1)
                for _ in range(m):
                    wp = wp * w
                if wp == GaussianRat(1):
                    r = base * w
                    if r not in roots:
                        roots.append(r)
            break
    return roots


def sqrt_in_gaussian_rationals(c: GaussianRat):
    """A square root of c in Q(i), or None."""
    roots = nth_roots_in_gaussian_rationals(c, 2)
    return roots[0] if roots else None


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# field handles
# ---------------------------------------------------------------------------

class RationalField:
    """The field Q, elements are Fractions."""

    characteristic = 0

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def from_int(self, n: int):
        return Fraction(n)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def describe(self):
        return {"kind": "Q"}


class GaussianRationalField:
    """The field Q(i), elements are GaussianRat."""

    characteristic = 0

    @property
    def zero(self):
        return GaussianRat(0)

    @property
    def one(self):
        return GaussianRat(1)

    @property
    def i(self):
        return GaussianRat(0, 1)

    def from_int(self, n: int):
        return GaussianRat(n)

    def __eq__(self, other):
        return isinstance(other, GaussianRationalField)

    def __hash__(self):
        return hash("QI")

    def __repr__(self):
        return "QI"

    def describe(self):
        return {"kind": "Qi"}


class PrimeField:
    """F_p, elements are FFElem with integer value in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    @property
    def zero(self):
        return FFElem(self, 0)

    @property
    def one(self):
        return FFElem(self, 1)

    def from_int(self, n: int):
        return FFElem(self, n % self.p)

    def elements(self):
        for v in range(self.p):
            yield FFElem(self, v)

    @property
    def order(self):
        return self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"

    def describe(self):
        return {"kind": "Fp", "p": self.p}


class FFElem:
    """Element of a prime field."""

    __slots__ = ("field", "val")

    def __init__(self, field: PrimeField, val: int):
        self.field = field
        self.val = val % field.p

    def _check(self, other):
        if isinstance(other, FFElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return FFElem(self.field, other)
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return FFElem(self.field, self.val + o.val)

    __radd__ = __add__

    def __neg__(self):
        return FFElem(self.field, -self.val)

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return FFElem(self.field, self.val - o.val)

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return FFElem(self.field, self.val * o.val)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        if o.val == 0:
            raise ZeroDivisionError(f"division by zero in {self.field}")
        return FFElem(self.field, self.val * pow(o.val, self.field.p - 2, self.field.p))

    def __rtruediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self.val == o.val

    def __hash__(self):
        return hash((self.field.p, self.val))

    def lex_key(self):
        return (self.val,)

    def __repr__(self):
        return f"{self.val}"


class ExtensionField:
    """base[x]/(modulus): finite extension of a base field.

    ``modulus`` is a monic irreducible tuple-polynomial over the base field.
    Works over F_p (giving F_{p^d}) and over Q(i)/Q (desk stand-ins for the
    characteristic-0 closure).  Towers are supported; ``total_degree`` is the
    degree over the prime field / over Q(i).
    """

    def __init__(self, base, modulus, gen_name: str = "a", *, check=True):
        modulus = polys.pnormalize(modulus, base)
        if len(modulus) < 2:
            raise ValueError("modulus must have degree >= 1")
        if modulus[-1] != base.one:
            raise ValueError("modulus must be monic")
        if check and not is_irreducible(modulus, base):
            raise ReduciblePolynomial(f"{modulus} is reducible over {base}")
        self.base = base
        self.modulus = modulus
        self.gen_name = gen_name
        self.degree = len(modulus) - 1
        self.characteristic = base.characteristic

    @property
    def zero(self):
        return ExtElem(self, ())

    @property
    def one(self):
        return ExtElem(self, (self.base.one,))

    @property
    def gen(self):
        return ExtElem(self, (self.base.zero, self.base.one))

    def from_int(self, n: int):
        return ExtElem(self, polys.pconst(self.base.from_int(n), self.base))

    def embed(self, x):
        """Image of a base-field element."""
        return ExtElem(self, polys.pconst(x, self.base))

    @property
    def total_degree(self):
        d = self.degree
        if isinstance(self.base, ExtensionField):
            d *= self.base.total_degree
        return d

    @property
    def order(self):
        if self.characteristic == 0:
            raise ValueError("characteristic-0 field is infinite")
        return self.base.order ** self.degree

    def elements(self):
        if self.characteristic == 0:
            raise ValueError("cannot enumerate a characteristic-0 field")
        base_elems = list(self.base.elements())

        def rec(k):
            if k == 0:
                yield ()
                return
            for rest in rec(k - 1):
                for b in base_elems:
                    yield (b,) + rest

        for tup in rec(self.degree):
            yield ExtElem(self, polys.pnormalize(tup, self.base))

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.base == self.base
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ext", self.base, len(self.modulus)))

    def __repr__(self):
        return f"{self.base}[{self.gen_name}]/({_poly_str(self.modulus, self.gen_name)})"

    def describe(self):
        return {
            "kind": "ext",
            "base": self.base.describe(),
            "modulus": [repr(c) for c in self.modulus],
            "gen": self.gen_name,
        }


def _poly_str(p, var):
    terms = []
    for i, c in enumerate(p):
        if c == 0 * c:
            continue
        if i == 0:
            terms.append(f"{c!r}")
        elif i == 1:
            terms.append(f"{c!r}*{var}")
        else:
            terms.append(f"{c!r}*{var}^{i}")
    return " + ".join(terms) if terms else "0"


class ExtElem:
    """Element of an ExtensionField, a tuple-polynomial in the generator."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtensionField, coeffs):
        self.field = field
        self.coeffs = polys.pnormalize(coeffs, field.base)

    def _check(self, other):
        if isinstance(other, ExtElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        # allow base-field scalars
        if other.__class__ in (Fraction, GaussianRat, FFElem):
            try:
                return self.field.embed(self.field.base.zero + other)
            except (FieldMismatch, TypeError):
                return None
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.field, polys.padd(self.coeffs, o.coeffs, self.field.base))

    __radd__ = __add__

    def __neg__(self):
        return ExtElem(self.field, polys.pneg(self.coeffs, self.field.base))

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        prod = polys.pmul(self.coeffs, o.coeffs, self.field.base)
        return ExtElem(self.field, polys.pmod(prod, self.field.modulus, self.field.base))

    __rmul__ = __mul__

    def inverse(self):
        if not self.coeffs:
            raise ZeroDivisionError(f"division by zero in {self.field}")
        g, s, _ = polys.pxgcd(self.coeffs, self.field.modulus, self.field.base)
        if polys.pdeg(g) != 0:
            raise ZeroDivisionError("element not invertible (modulus reducible?)")
        inv = polys.pscale(s, self.field.base.one / g[0], self.field.base)
        return ExtElem(self.field, inv)

    def __truediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((id(type(self.field)), self.coeffs))

    def lex_key(self):
        key = []
        for idx in range(self.field.degree):
            c = self.coeffs[idx] if idx < len(self.coeffs) else self.field.base.zero
            key.append(_lex_of(c))
        return tuple(key)

    def __repr__(self):
        return _poly_str(self.coeffs, self.field.gen_name) or "0"


def _lex_of(c):
    if isinstance(c, FFElem):
        return c.lex_key()
    if isinstance(c, ExtElem):
        return c.lex_key()
    if isinstance(c, Fraction):
        return (c,)
    if isinstance(c, GaussianRat):
        return (c.re, c.im)
    raise TypeError(f"no lex key for {type(c)}")


class RationalFunctionField:
    """base(u): rational functions in one variable over a base field.

    Used as the coefficient field bundling the equivariant parameter u (with
    u invertible); tracks the largest u-degree seen in ``u_watermark`` so a
    truncation-window certificate can be issued after a computation.
    """

    def __init__(self, base, var: str = "u"):
        self.base = base
        self.var = var
        self.characteristic = base.characteristic
        self.u_watermark = 0

    @property
    def zero(self):
        return RatFunc(self, (), (self.base.one,))

    @property
    def one(self):
        return RatFunc(self, (self.base.one,), (self.base.one,))

    @property
    def u(self):
        return RatFunc(self, (self.base.zero, self.base.one), (self.base.one,))

    def from_int(self, n: int):
        return RatFunc(self, polys.pconst(self.base.from_int(n), self.base), (self.base.one,))

    def embed(self, x):
        return RatFunc(self, polys.pconst(x, self.base), (self.base.one,))

    def _see(self, deg: int):
        if deg > self.u_watermark:
            self.u_watermark = deg

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunctionField)
            and other.base == self.base
            and other.var == self.var
        )

    def __hash__(self):
        return hash(("ratfunc", self.base, self.var))

    def __repr__(self):
        return f"{self.base}({self.var})"

    def describe(self):
        return {"kind": "ratfunc", "base": self.base.describe(), "var": self.var}


class RatFunc:
    """num/den over the base field, gcd-reduced with monic denominator."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: RationalFunctionField, num, den):
        base = field.base
        num = polys.pnormalize(num, base)
        den = polys.pnormalize(den, base)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if num:
            g = polys.pgcd(num, den, base)
            if polys.pdeg(g) > 0:
                num = polys.pdivmod(num, g, base)[0]
                den = polys.pdivmod(den, g, base)[0]
        else:
            den = (base.one,)
        lead = den[-1]
        if lead != base.one:
            inv = base.one / lead
            num = polys.pscale(num, inv, base)
            den = polys.pscale(den, inv, base)
        self.field = field
        self.num = num
        self.den = den
        field._see(max(polys.pdeg(num), polys.pdeg(den)))

    def _check(self, other):
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        base = self.field.base
        num = polys.padd(
            polys.pmul(self.num, o.den, base), polys.pmul(o.num, self.den, base), base
        )
        return RatFunc(self.field, num, polys.pmul(self.den, o.den, base))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.field, polys.pneg(self.num, self.field.base), self.den)

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        base = self.field.base
        return RatFunc(
            self.field,
            polys.pmul(self.num, o.num, base),
            polys.pmul(self.den, o.den, base),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        base = self.field.base
        return RatFunc(
            self.field,
            polys.pmul(self.num, o.den, base),
            polys.pmul(self.den, o.num, base),
        )

    def __rtruediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((len(self.num), self.num, self.den))

    def __repr__(self):
        def fmt(p):
            return _poly_str(p, self.field.var) or "0"

        if self.den == (self.field.base.one,):
            return fmt(self.num)
        return f"({fmt(self.num)})/({fmt(self.den)})"


QQ = RationalField()
QI = GaussianRationalField()


# ---------------------------------------------------------------------------
# irreducibility and roots
# ---------------------------------------------------------------------------

def sqrt_in_field(x, field):
    """A square root of x in ``field``, or None.

    Supported: Q, Q(i), finite fields (exhaustive), and characteristic-0
    quadratic extensions with modulus of shape y^2 - r.
    """
    if isinstance(field, RationalField):
        if x < 0:
            return None
        return sqrt_fraction(x)
    if isinstance(field, GaussianRationalField):
        if x == GaussianRat(0):
            return GaussianRat(0)
        return sqrt_in_gaussian_rationals(x)
    if field.characteristic > 0:
        for e in field.elements():
            if e * e == x:
                return e
        return None
    if isinstance(field, ExtensionField) and field.degree == 2 and field.modulus[1] == field.base.zero:
        r = -field.modulus[0]
        base = field.base
        x0 = x.coeffs[0] if len(x.coeffs) > 0 else base.zero
        x1 = x.coeffs[1] if len(x.coeffs) > 1 else base.zero
        if x1 == base.zero:
            u = sqrt_in_field(x0, base)
            if u is not None:
                return field.embed(u)
            v = sqrt_in_field(x0 / r, base)
            if v is not None:
                return field.gen * field.embed(v)
            return None
        D = sqrt_in_field(x0 * x0 - r * x1 * x1, base)
        if D is None:
            return None
        two = base.from_int(2)
        for sign in (base.one, -base.one):
            s = (x0 + sign * D) / two
            if s == base.zero:
                continue
            u = sqrt_in_field(s, base)
            if u is not None:
                v = x1 / (two * u)
                return field.embed(u) + field.gen * field.embed(v)
        return None
    return None


def roots_in_field(p, field) -> list:
    """All roots of the tuple-polynomial p within ``field`` (with multiplicity).

    Finite fields are searched exhaustively.  Over Q and Q(i) candidate roots
    are enumerated from Gaussian-divisor pairs of the cleared constant and
    leading coefficients (the rational root theorem transplanted to Z[i]);
    characteristic-0 extensions additionally get linear and quadratic factors
    solved in closed form via sqrt_in_field.
    """
    p = polys.pnormalize(p, field)
    if polys.pdeg(p) < 1:
        return []
    roots = []
    rem = p
    if field.characteristic > 0:
        changed = True
        while changed and polys.pdeg(rem) >= 1:
            changed = False
            for x in field.elements():
                if polys.peval(rem, x, field) == field.zero:
                    rem = polys.pdivmod(rem, (-x, field.one), field)[0]
                    roots.append(x)
                    changed = True
                    break
        return roots
    # characteristic 0: candidate enumeration from Z[i] divisors
    for cand in _char0_root_candidates(rem, field):
        while polys.peval(rem, cand, field) == field.zero:
            rem = polys.pdivmod(rem, (-cand, field.one), field)[0]
            roots.append(cand)
            if polys.pdeg(rem) < 1:
                break
        if polys.pdeg(rem) < 1:
            break
    # low-degree remainders in closed form
    while polys.pdeg(rem) in (1, 2):
        if polys.pdeg(rem) == 1:
            roots.append(-rem[0] / rem[1])
            rem = ()
            break
        b, a = rem[1], rem[2]
        disc = b * b - field.from_int(4) * a * rem[0]
        sq = sqrt_in_field(disc, field)
        if sq is None:
            break
        two_a = field.from_int(2) * a
        r1 = (-b + sq) / two_a
        r2 = (-b - sq) / two_a
        roots.extend([r1, r2])
        rem = ()
    return roots


def _to_gauss(c):
    if isinstance(c, GaussianRat):
        return c
    if isinstance(c, Fraction):
        return GaussianRat(c)
    raise TypeError(f"not a rational-type coefficient: {type(c)}")


def _char0_root_candidates(p, field):
    """Candidate roots u/v with u | a0, v | lead (in Z[i]), units included."""
    if isinstance(field, ExtensionField):
        # only the base-coercible layer is enumerable: if every coefficient
        # is an embedded base element, search the base candidates
        if all(len(c.coeffs) <= 1 for c in p):
            stripped = tuple(
                (c.coeffs[0] if c.coeffs else field.base.zero) for c in p
            )
            for cand in _char0_root_candidates(
                polys.pnormalize(stripped, field.base), field.base
            ):
                yield field.embed(cand)
        return
    gp = [_to_gauss(c) for c in p]
    # clear denominators
    mult = 1
    for g in gp:
        mult = mult * (g.re.denominator * g.im.denominator) // _gcd_int(
            mult, g.re.denominator * g.im.denominator
        )
    gp = [g * GaussianRat(mult) for g in gp]
    a0 = gp[0]
    lead = gp[-1]
    if a0.norm() == 0:
        yield field.zero
        # strip the zero root and recurse on the shifted poly
        rest = polys.pnormalize(p[1:], field)
        yield from _char0_root_candidates(rest, field)
        return
    num_divs = _gaussian_divisors(a0)
    den_divs = _gaussian_divisors(lead)
    seen = set()
    for u in num_divs:
        for v in den_divs:
            for unit in _UNITS:
                cand = (u * unit) / v
                key = (cand.re, cand.im)
                if key in seen:
                    continue
                seen.add(key)
                if isinstance(field, RationalField):
                    if cand.im != 0:
                        continue
                    yield cand.re
                else:
                    yield cand


def _gaussian_divisors(z: GaussianRat, cap: int = 4096) -> list:
    """Divisors of a nonzero Gaussian integer, up to units."""
    unit, fac = gaussian_factor(z)
    divisors = [GaussianRat(1)]
    for key, e in fac.items():
        pi = GaussianRat(key[0], key[1])
        new = []
        for d in divisors:
            cur = d
            for _ in range(e + 1):
                new.append(cur)
                cur = cur * pi
        divisors = new
        if len(divisors) > cap:
            raise FieldBudgetExceeded(
                f"too many Gaussian divisors while root-hunting (> {cap})"
            )
    return divisors


def is_irreducible(p, field) -> bool:
    """Desk-scale irreducibility test for a monic tuple-polynomial.

    Degrees 2 and 3: no root in the field.  Higher degree over a finite
    field: no factor found by exhaustive trial division of low-degree monic
    polynomials.  Higher degree over Q/Q(i) raises FieldBudgetExceeded (out
    of desk scope) unless a root exists, which settles reducibility.
    """
    d = polys.pdeg(p)
    if d <= 0:
        return False
    if d == 1:
        return True
    if roots_in_field(p, field):
        return False
    if d <= 3:
        return True
    if field.characteristic > 0:
        return not _finite_field_proper_factor(p, field)
    raise FieldBudgetExceeded(
        f"irreducibility of degree-{d} polynomials over {field} is beyond desk scale"
    )


def _finite_field_proper_factor(p, field):
    d = polys.pdeg(p)
    base_order = field.order
    for deg in range(2, d // 2 + 1):
        if base_order ** deg > 50000:
            raise FieldBudgetExceeded("finite-field trial factorization too large")
        for cand in _monic_polys_of_degree(deg, field):
            if polys.pmod(p, cand, field) == ():
                return cand
    return None


def _monic_polys_of_degree(deg, field):
    elems = list(field.elements())

    def rec(k):
        if k == 0:
            yield ()
            return
        for rest in rec(k - 1):
            for e in elems:
                yield rest + (e,)

    for lower in rec(deg):
        yield polys.pnormalize(lower + (field.one,), field)


def extend_field(p: int, modulus_ints, gen_name: str = "a") -> ExtensionField:
    """F_p[x]/(f) for f given by integer coefficients (constant first).

    Raises ReduciblePolynomial when f factors over F_p; degree budget applies.
    """
    base = PrimeField(p)
    modulus = polys.pnormalize([base.from_int(c) for c in modulus_ints], base)
    if polys.pdeg(modulus) > DEFAULT_DEGREE_BUDGET:
        raise FieldBudgetExceeded(
            f"extension degree {polys.pdeg(modulus)} exceeds budget {DEFAULT_DEGREE_BUDGET}"
        )
    return ExtensionField(base, modulus, gen_name)


# ---------------------------------------------------------------------------
# splitting helpers: find all roots, adjoining at most one extension
# ---------------------------------------------------------------------------

def roots_with_extension(p, field, budget: int = DEFAULT_DEGREE_BUDGET):
    """All roots of monic ``p``, adjoining one extension if needed.

    Returns (field2, roots, embed) where ``field2`` is ``field`` or a single
    extension of it, ``roots`` are the roots of p found in field2 (with
    multiplicity), and ``embed`` maps field elements into field2.  Raises
    FieldBudgetExceeded when the rootless part cannot be split within the
    desk rules (see ledger).
    """
    p = polys.pmonic(polys.pnormalize(p, field), field)
    base_roots = roots_in_field(p, field)
    rem = p
    for r in base_roots:
        rem = polys.pdivmod(rem, (-r, field.one), field)[0]
    if polys.pdeg(rem) < 1:
        return field, base_roots, lambda x: x
    if field.characteristic > 0:
        # adjoin via an irreducible factor of the remainder, then re-search
        fac = _irreducible_factor_finite(rem, field)
        if polys.pdeg(fac) * _field_total_degree(field) > budget:
            raise FieldBudgetExceeded(
                f"needed extension of degree {polys.pdeg(fac)} over {field}"
            )
        ext = ExtensionField(field, fac, _next_gen_name(field), check=False)
        lifted = tuple(ext.embed(c) for c in p)
        roots = roots_in_field(lifted, ext)
        if len(roots) < polys.pdeg(p):
            raise FieldBudgetExceeded(
                f"{_poly_str(p, 'x')} does not split over one extension of {field}"
            )
        return ext, roots, ext.embed
    # characteristic 0
    if polys.pdeg(rem) == 2:
        return _split_quadratic(p, base_roots, rem, field, budget)
    raise FieldBudgetExceeded(
        f"rootless degree-{polys.pdeg(rem)} part over {field} is beyond desk scale"
    )


def _split_quadratic(p, base_roots, rem, field, budget):
    """Adjoin sqrt(disc) of the rootless quadratic and return all roots."""
    b, a = rem[1], rem[2]
    c0 = rem[0]
    disc = b * b - field.from_int(4) * a * c0
    # normalize the radicand: strip the largest square factor we can see
    radicand, scale = _strip_square(disc, field)
    two = field.from_int(2)
    if 2 * _field_total_degree(field) > budget:
        raise FieldBudgetExceeded("quadratic extension exceeds degree budget")
    ext = ExtensionField(
        field,
        (-radicand, field.zero, field.one),
        _next_gen_name(field),
        check=False,
    )
    sqrt_disc = ext.gen * ext.embed(scale)
    r1 = (ext.embed(-b) + sqrt_disc) / ext.embed(two * a)
    r2 = (ext.embed(-b) - sqrt_disc) / ext.embed(two * a)
    roots = [ext.embed(r) for r in base_roots] + [r1, r2]
    return ext, roots, ext.embed


def _strip_square(disc, field):
    """disc = radicand * scale^2 with radicand as small as desk rules allow."""
    if isinstance(field, RationalField):
        num = disc.numerator
        den = disc.denominator
        s_num = _largest_square_divisor(abs(num))
        s_den = _largest_square_divisor(den)
        scale = Fraction(s_num, s_den)
        return disc / (scale * scale), scale
    if isinstance(field, GaussianRationalField):
        if disc != GaussianRat(0):
            root = sqrt_in_gaussian_rationals(disc)
            if root is not None:
                return GaussianRat(1), root
        # no visible square factor: adjoin the discriminant itself
        return disc, GaussianRat(1)
    return disc, field.one


def _largest_square_divisor(n: int) -> int:
    if n == 0:
        return 1
    out = 1
    for p, e in factorint(n).items():
        out *= p ** (e // 2)
    return out


def _irreducible_factor_finite(rem, field):
    d = polys.pdeg(rem)
    if d <= 3:
        return polys.pmonic(rem, field) if d != 1 else rem
    fac = _finite_field_proper_factor(rem, field)
    if fac is None:
        return polys.pmonic(rem, field)
    return fac


def _field_total_degree(field) -> int:
    if isinstance(field, ExtensionField):
        return field.total_degree
    return 1


def _next_gen_name(field) -> str:
    names = []
    f = field
    while isinstance(f, ExtensionField):
        names.append(f.gen_name)
        f = f.base
    for cand in "abcdefg":
        if cand not in names:
            return cand
    return "w"


# ---------------------------------------------------------------------------
# mod-p reduction
# ---------------------------------------------------------------------------

def _reduce_fraction(q: Fraction, p: int) -> int:
    if q.denominator % p == 0:
        raise DenominatorDivisibleByP(
            f"denominator {q.denominator} divisible by {p} (prime too small)"
        )
    return (q.numerator % p) * pow(q.denominator % p, p - 2, p) % p if p > 2 else (
        q.numerator % 2
    ) * pow(q.denominator % 2, 1, 2) % 2


def gaussian_residue_field(p: int):
    """(field, image_of_i) for the fixed reduction Z[i] -> char-p world.

    p ≡ 1 (mod 4): F_p with i mapped to the lexicographically smallest root
    of x^2+1.  p ≡ 3 (mod 4): F_{p^2} = F_p[x]/(x^2+1) with i mapped to the
    generator (its lex-smallest root).  p = 2: F_2 with i -> 1.
    """
    base = PrimeField(p)
    if p == 2:
        return base, base.one
    if p % 4 == 1:
        r = _sqrt_minus_one_mod(p)
        r = min(r, p - r)
        return base, base.from_int(r)
    ext = ExtensionField(base, (base.one, base.zero, base.one), "i", check=False)
    return ext, ext.gen


def reduce_mod_p(x, p: int):
    """Reduction of a Fraction or GaussianRat modulo p.

    Returns an element of F_p, or of F_{p^2} when the image of i requires it.
    Raises DenominatorDivisibleByP when p divides a denominator.
    """
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        return PrimeField(p).from_int(_reduce_fraction(q, p))
    if isinstance(x, GaussianRat):
        fld, i_img = gaussian_residue_field(p)
        re = _reduce_fraction(x.re, p)
        im = _reduce_fraction(x.im, p)
        return fld.from_int(re) + fld.from_int(im) * i_img
    raise TypeError(f"cannot reduce {type(x)} mod p")


def residue_hom(field, p: int):
    """(target_field, fn) reducing ``field`` elements mod p.

    Supports Q, Q(i) and one extension layer over them; the adjoined
    generator goes to the lex-smallest root of the reduced minimal polynomial
    in the smallest F_{p^k} containing one.
    """
    if isinstance(field, RationalField):
        tgt = PrimeField(p)
        return tgt, lambda x: tgt.from_int(_reduce_fraction(Fraction(x), p))
    if isinstance(field, GaussianRationalField):
        tgt, _ = gaussian_residue_field(p)
        return tgt, lambda x: reduce_mod_p(x, p)
    if isinstance(field, ExtensionField) and field.characteristic == 0:
        base_tgt, base_fn = residue_hom(field.base, p)
        mod_red = polys.pnormalize([base_fn(c) for c in field.modulus], base_tgt)
        # find the smallest extension of base_tgt containing a root
        cands = roots_in_field(mod_red, base_tgt)
        if cands:
            root = min(cands, key=_lex_of)
            tgt = base_tgt
        else:
            tgt, roots, emb = roots_with_extension(mod_red, base_tgt)
            if not roots:
                raise PrimeTooSmallInternal(p)
            root = min(roots, key=_lex_of)
            base_fn0 = base_fn
            base_fn = lambda x: emb(base_fn0(x))  # noqa: E731

        def fn(x, _tgt=tgt, _root=root, _bf=base_fn):
            acc = _tgt.zero
            for c in reversed(x.coeffs):
                acc = acc * _root + _bf(c)
            return acc

        return tgt, fn
    raise TypeError(f"no residue map for {field}")


class PrimeTooSmallInternal(Exception):
    pass
