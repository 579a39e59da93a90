"""Dense univariate polynomial helpers over an arbitrary coefficient field.

Polynomials are plain tuples of coefficients, constant term first, with no
trailing zeros (the zero polynomial is the empty tuple).  The coefficient
field is passed explicitly as a handle providing ``zero``/``one``; the
elements themselves must support +, -, *, / and ==.  Keeping these as free
functions (rather than a class) lets extension-field arithmetic, resultants
and characteristic polynomials share one code path without wrapper overhead.
"""

from __future__ import annotations


def pnormalize(coeffs, field):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == field.zero:
        coeffs.pop()
    return tuple(coeffs)


def pzero(field):
    return ()


def pconst(c, field):
    return pnormalize([c], field)


def pdeg(p):
    """Degree; -1 for the zero polynomial."""
    return len(p) - 1


def padd(p, q, field):
    n = max(len(p), len(q))
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else field.zero
        b = q[i] if i < len(q) else field.zero
        out.append(a + b)
    return pnormalize(out, field)


def pneg(p, field):
    return tuple(-a for a in p)


def psub(p, q, field):
    return padd(p, pneg(q, field), field)


def pmul(p, q, field):
    if not p or not q:
        return ()
    out = [field.zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == field.zero:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return pnormalize(out, field)


def pscale(p, c, field):
    return pnormalize([a * c for a in p], field)


def pdivmod(p, q, field):
    """Euclidean division; q must be nonzero."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    quot = [field.zero] * max(0, len(p) - len(q) + 1)
    dq = len(q) - 1
    lead = q[-1]
    while len(rem) - 1 >= dq and any(a != field.zero for a in rem):
        while rem and rem[-1] == field.zero:
            rem.pop()
        if len(rem) - 1 < dq:
            break
        factor = rem[-1] / lead
        shift = len(rem) - 1 - dq
        quot[shift] = quot[shift] + factor
        for i, b in enumerate(q):
            rem[shift + i] = rem[shift + i] - factor * b
        rem.pop()
    return pnormalize(quot, field), pnormalize(rem, field)


def pmod(p, q, field):
    return pdivmod(p, q, field)[1]


def pgcd(p, q, field):
    """Monic gcd."""
    a, b = p, q
    while b:
        a, b = b, pmod(a, b, field)
    if a:
        a = pscale(a, field.one / a[-1], field)
    return a


def pxgcd(p, q, field):
    """Extended gcd: returns (g, s, t) with s*p + t*q = g, g monic."""
    r0, r1 = p, q
    s0, s1 = pconst(field.one, field), ()
    t0, t1 = (), pconst(field.one, field)
    while r1:
        qq, rr = pdivmod(r0, r1, field)
        r0, r1 = r1, rr
        s0, s1 = s1, psub(s0, pmul(qq, s1, field), field)
        t0, t1 = t1, psub(t0, pmul(qq, t1, field), field)
    if r0:
        c = field.one / r0[-1]
        r0 = pscale(r0, c, field)
        s0 = pscale(s0, c, field)
        t0 = pscale(t0, c, field)
    return r0, s0, t0


def peval(p, x, field):
    acc = field.zero
    for a in reversed(p):
        acc = acc * x + a
    return acc


def pderiv(p, field):
    out = []
    for i in range(1, len(p)):
        c = p[i]
        s = field.zero
        for _ in range(i):
            s = s + c
        out.append(s)
    return pnormalize(out, field)


def pmonic(p, field):
    if not p:
        return p
    return pscale(p, field.one / p[-1], field)


def ppow_mod(p, e, modulus, field):
    """p^e mod modulus (binary powering)."""
    result = pconst(field.one, field)
    base = pmod(p, modulus, field)
    while e > 0:
        if e & 1:
            result = pmod(pmul(result, base, field), modulus, field)
        base = pmod(pmul(base, base, field), modulus, field)
        e >>= 1
    return result
