"""The Z/p algebraic layer: Borel model, tensor powers, Tate differential.

The Borel model is the standard equivariant Morse complex on the infinite
sphere truncated at index 2*l_max+1: generators Z_k^m (m cyclic mod p) with

    d Z_{2l}^m   = Z_{2l+1}^m - Z_{2l+1}^{m+1},
    d Z_{2l+1}^m = Z_{2l+2}^0 + ... + Z_{2l+2}^{p-1}.

The Tate complex of a base complex C over a characteristic-p Novikov ring is
built on C^{tensor p} x {1, theta} with

    d(x (x) 1)     = d^{(x)p} x + theta (1 - zeta) x,
    d(x (x) theta) = -theta d^{(x)p} x + u (1 + zeta + ... + zeta^{p-1}) x,

where zeta cyclically rotates tensor factors with the Koszul sign
(-1)^{|x_{p-1}| (|x_0|+...+|x_{p-2}|)}.  The equivariant parameter u lives in
the coefficient field F_{p^k}(u) (exact rational functions), and the window
parameter M is a leak certificate: the run fails with WindowTooSmall if any
intermediate u-degree exceeds M.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CertificateError, ParseError, WindowTooSmall
from .fields import QQ, PrimeField, RationalFunctionField, is_prime
from .filtered import FilteredComplex, Generator
from .series import NovikovSeries


# ---------------------------------------------------------------------------
# Borel model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BorelMorseComplex:
    """Truncated equivariant sphere model: p odd prime, indices 0..2*l_max+1."""

    p: int
    l_max: int

    def labels(self):
        return [
            (k, m) for k in range(2 * self.l_max + 2) for m in range(self.p)
        ]

    def complex(self, field) -> FilteredComplex:
        """The upstairs complex over ``field``; all actions zero, verbose."""
        gens = [Generator(_zlabel(k, m), k % 2, Fraction(0)) for k, m in self.labels()]
        one = NovikovSeries.one(field)
        diff: dict = {}
        top = 2 * self.l_max + 1
        for k, m in self.labels():
            if k % 2 == 0:
                row = {
                    _zlabel(k + 1, m): one,
                    _zlabel(k + 1, (m + 1) % self.p): -one,
                }
                diff[_zlabel(k, m)] = row
            elif k < top:
                diff[_zlabel(k, m)] = {
                    _zlabel(k + 1, j): one for j in range(self.p)
                }
        return FilteredComplex(field, gens, diff, mode="verbose")

    def equivariant(self, field) -> bool:
        """The differential commutes with the cyclic index shift."""
        C = self.complex(field)
        for k, m in self.labels():
            src = _zlabel(k, m)
            shifted_src = _zlabel(k, (m + 1) % self.p)
            row = C.diff.get(src, {})
            srow = C.diff.get(shifted_src, {})
            rotated = {_shift_label(t, self.p): c for t, c in row.items()}
            if set(rotated) != set(srow):
                return False
            for t, c in rotated.items():
                if (c - srow[t]).terms:
                    return False
        return True


def _zlabel(k: int, m: int) -> str:
    return f"Z{k}_{m}"


def _shift_label(label: str, p: int) -> str:
    k, m = label[1:].split("_")
    return _zlabel(int(k), (int(m) + 1) % p)


def borel_morse_complex(p: int, l_max: int) -> BorelMorseComplex:
    if p == 2 or not is_prime(p):
        raise ParseError("p must be an odd prime")
    if l_max < 1:
        raise ParseError("l_max must be >= 1")
    return BorelMorseComplex(p, l_max)


def borel_homology_ranks(B: BorelMorseComplex, field) -> list:
    """Homology ranks per degree of the descended (invariant) complex.

    Over F_p the descended differential vanishes and every degree 0..2l+1 has
    rank one; over Q only degree 0 (and the truncation's top sphere degree)
    survive.  Computed by direct elimination, degree by degree.
    """
    top = 2 * B.l_max + 1
    # descended complex: one generator per index k, d(w_{2l+1}) = p*w_{2l+2}
    p_in_field = field.from_int(B.p)
    ranks = []
    for k in range(top + 1):
        d_in = p_in_field if (k % 2 == 0 and k > 0) else field.zero
        d_out = p_in_field if (k % 2 == 1 and k < top) else field.zero
        dim_k = 1
        rank_out = 0 if d_out == field.zero else 1
        rank_in = 0 if d_in == field.zero else 1
        ranks.append(dim_k - rank_out - rank_in)
    return ranks


# ---------------------------------------------------------------------------
# tensor powers with the signed cyclic operator
# ---------------------------------------------------------------------------

def tensor_power_with_zeta(C: FilteredComplex, p: int):
    """(C^{tensor p} as a FilteredComplex, zeta as {label: (label, sign)}).

    Generators are p-tuples of base generators (labels joined by '|'),
    degree the sum mod 2, action the sum.  The differential is the signed
    Leibniz rule; zeta carries the displayed Koszul sign.
    """
    base_gens = C.generators
    from itertools import product as iproduct

    tuples = list(iproduct(range(C.n), repeat=p))
    gens = []
    for tup in tuples:
        label = "|".join(base_gens[i].label for i in tup)
        degree = sum(base_gens[i].degree for i in tup) % 2
        action = sum((base_gens[i].action for i in tup), Fraction(0))
        gens.append(Generator(label, degree, action))
    diff: dict = {}
    for tup in tuples:
        src = "|".join(base_gens[i].label for i in tup)
        row: dict = {}
        sign = 1
        for slot in range(p):
            gi = base_gens[tup[slot]]
            drow = C.diff.get(gi.label, {})
            for tgt_label, series in drow.items():
                out = [base_gens[i].label for i in tup]
                out[slot] = tgt_label
                key = "|".join(out)
                contrib = series if sign > 0 else -series
                row[key] = row[key] + contrib if key in row else contrib
            if gi.degree % 2 == 1:
                sign = -sign
        row = {k: v for k, v in row.items() if v.terms}
        if row:
            diff[src] = row
    power = FilteredComplex(C.field, gens, diff, mode=C.mode)
    zeta = {}
    for tup in tuples:
        src = "|".join(base_gens[i].label for i in tup)
        last = base_gens[tup[-1]]
        rest_degree = sum(base_gens[i].degree for i in tup[:-1])
        sign = -1 if (last.degree * rest_degree) % 2 == 1 else 1
        rotated = (tup[-1],) + tup[:-1]
        tgt = "|".join(base_gens[i].label for i in rotated)
        zeta[src] = (tgt, sign)
    return power, zeta


def zeta_power_is_identity(zeta: dict, p: int) -> bool:
    for label in zeta:
        cur, sign = label, 1
        for _ in range(p):
            nxt, s = zeta[cur]
            cur, sign = nxt, sign * s
        if cur != label or sign != 1:
            return False
    return True


def zeta_commutes_with_differential(power: FilteredComplex, zeta: dict) -> bool:
    """(d zeta - zeta d) = 0, entrywise and exactly."""
    for src in zeta:
        zsrc, s1 = zeta[src]
        lhs: dict = {}
        for tgt, series in power.diff.get(zsrc, {}).items():
            lhs[tgt] = series.scale(series.field.from_int(s1))
        rhs: dict = {}
        for tgt, series in power.diff.get(src, {}).items():
            ztgt, s2 = zeta[tgt]
            contrib = series.scale(series.field.from_int(s2))
            rhs[ztgt] = rhs[ztgt] + contrib if ztgt in rhs else contrib
        keys = set(lhs) | set(rhs)
        for k in keys:
            a = lhs.get(k)
            b = rhs.get(k)
            if a is None or b is None:
                if (a or b).terms:
                    return False
            elif (a - b).terms:
                return False
    return True


# ---------------------------------------------------------------------------
# the Tate complex
# ---------------------------------------------------------------------------

@dataclass
class TateComplex:
    """Windowed Tate complex over F_{p^k}(u) with a leak certificate."""

    complex: FilteredComplex
    p: int
    window: int
    field: RationalFunctionField

    def assert_leak_free(self):
        if self.field.u_watermark > self.window:
            raise WindowTooSmall(
                f"u-degree {self.field.u_watermark} exceeded the window {self.window}"
            )
        return True


def tate_differential(C: FilteredComplex, p: int, window: int) -> TateComplex:
    """Build the Z/p Tate complex of a characteristic-p base complex."""
    if C.field.characteristic != p:
        raise ParseError(
            f"base complex must live in characteristic {p}, not {C.field.characteristic}"
        )
    if p == 2 or not is_prime(p):
        raise ParseError("p must be an odd prime")
    power, zeta = tensor_power_with_zeta(C, p)
    K = RationalFunctionField(C.field)
    u = K.u

    def lift(series: NovikovSeries) -> NovikovSeries:
        return series.map_coeffs(K.embed, K)

    gens = []
    for g in power.generators:
        gens.append(Generator(g.label + "*1", g.degree, g.action))
        gens.append(Generator(g.label + "*th", (g.degree + 1) % 2, g.action))
    diff: dict = {}
    for g in power.generators:
        row1: dict = {}
        rowth: dict = {}
        # d^{(x)p} blocks
        for tgt, series in power.diff.get(g.label, {}).items():
            s = lift(series)
            row1[tgt + "*1"] = s
            rowth[tgt + "*th"] = -s
        # theta (1 - zeta)
        ztgt, sign = zeta[g.label]
        one = NovikovSeries.one(K)
        _acc(row1, g.label + "*th", one)
        _acc(row1, ztgt + "*th", one.scale(K.from_int(-sign)))
        # u * norm
        norm: dict = {}
        cur, sgn = g.label, 1
        for _ in range(p):
            _acc_scalar(norm, cur, sgn)
            nxt, s = zeta[cur]
            cur, sgn = nxt, sgn * s
        for tgt, k in norm.items():
            if k % p != 0:
                _acc(rowth, tgt + "*1", NovikovSeries.monomial(K, 0, u * K.from_int(k)))
        diff[g.label + "*1"] = {k: v for k, v in row1.items() if v.terms}
        diff[g.label + "*th"] = {k: v for k, v in rowth.items() if v.terms}
    complex = FilteredComplex(K, gens, {k: v for k, v in diff.items() if v}, mode="verbose")
    tc = TateComplex(complex=complex, p=p, window=window, field=K)
    tc.assert_leak_free()
    return tc


def _acc(row: dict, key: str, series: NovikovSeries):
    row[key] = row[key] + series if key in row else series


def _acc_scalar(d: dict, key: str, k: int):
    d[key] = d.get(key, 0) + k


def tate_torsion_exponents(TC: TateComplex) -> list:
    """Nonzero torsion exponents of the Tate complex, per theta-line.

    The raw complex carries the theta-doubling (its homology is free over
    the exterior generator), so every invariant appears exactly twice; this
    is asserted, and one copy is returned.  CertificateError if the doubling
    fails, WindowTooSmall on a leaking u-window.
    """
    B = TC.complex.barcode()
    TC.assert_leak_free()
    bars = sorted(b for b in B.finite_bars if b > 0)
    return _halve_double_multiset(bars, "Tate torsion exponents")


def _halve_double_multiset(items: list, what: str) -> list:
    if len(items) % 2 != 0:
        raise CertificateError(f"{what} are not theta-doubled (odd count)")
    one_copy = []
    it = iter(sorted(items))
    for a in it:
        b = next(it)
        if a != b:
            raise CertificateError(f"{what} are not theta-doubled ({a} vs {b})")
        one_copy.append(a)
    return one_copy


def base_torsion_exponents(C: FilteredComplex) -> list:
    B = C.barcode()
    return sorted(b for b in B.finite_bars if b > 0)


def quasi_frobenius_check(C: FilteredComplex, p: int, window: int) -> dict:
    """Compare Tate invariants against the rescaled base invariants.

    The expected identification sends the base homology through T -> T^{1/p},
    so torsion exponents must scale by p and free ranks must agree.  Returns
    a report with witnesses; raises WindowTooSmall on a leaking window.
    """
    TC = tate_differential(C, p, window)
    tate_bars = tate_torsion_exponents(TC)
    base_bars = base_torsion_exponents(C)
    expected = sorted(Fraction(p) * g for g in base_bars)
    base_free = C.barcode().infinite_bars
    # the raw free rank carries the theta-doubling as well
    tate_free_raw = TC.complex.barcode().infinite_bars
    if tate_free_raw % 2 != 0:
        raise CertificateError("Tate free rank is not theta-doubled")
    tate_free = tate_free_raw // 2
    ok = tate_bars == expected and tate_free == base_free
    return {
        "p": p,
        "window": window,
        "u_watermark": TC.field.u_watermark,
        "base_torsion": [str(g) for g in base_bars],
        "tate_torsion": [str(g) for g in tate_bars],
        "expected_tate_torsion": [str(g) for g in expected],
        "base_free_rank": base_free,
        "tate_free_rank": tate_free,
        "match": ok,
        "base_total": str(sum(base_bars, Fraction(0))),
        "tate_total": str(sum(tate_bars, Fraction(0))),
    }


# ---------------------------------------------------------------------------
# the growth-vs-bounded-depth arithmetic demo
# ---------------------------------------------------------------------------

def smith_demo(base_tau, depth_bound, bar_count: int, p: int, k_max: int = 64) -> dict:
    """Smallest k with p^k * base_tau > bar_count * depth_bound.

    The executable form of the contradiction: iterated total bar length grows
    like p^k while a bounded depth with finitely many bars caps it.  Reports
    "vacuous" when base_tau = 0 (no growth to exploit).
    """
    base_tau = Fraction(base_tau)
    depth_bound = Fraction(depth_bound)
    if base_tau < 0 or depth_bound < 0 or bar_count < 0:
        raise ParseError("smith_demo inputs must be nonnegative")
    cap = Fraction(bar_count) * depth_bound
    if base_tau == 0:
        return {"vacuous": True, "reason": "base total bar length is zero"}
    for k in range(k_max + 1):
        lhs = Fraction(p) ** k * base_tau
        if lhs > cap:
            return {
                "vacuous": False,
                "k": k,
                "growth": str(lhs),
                "cap": str(cap),
                "p": p,
            }
    raise CertificateError(f"no contradiction within k <= {k_max} (inputs too large)")
