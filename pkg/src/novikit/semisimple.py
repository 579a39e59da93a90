"""Finite-dimensional commutative algebras over Novikov fields.

Semisimplicity is certified through a multiplication operator with distinct
nonzero eigenvalues: the characteristic polynomial's roots are lifted by
Newton-polygon segmentation + Hensel iteration, and the idempotents are the
Lagrange interpolation polynomials e_l = prod_{j != l} (a - lam_j)/(lam_l -
lam_j) evaluated in the algebra (identical to the eigenbasis construction
for distinct eigenvalues, but certifiable without eigenvector elimination).

The mod-p transfer truncates, clears denominators, reduces, and re-lifts in
characteristic p, then asserts the idempotent identities at precision Z and
the p-independence of the idempotent valuations.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (
    CertificateError,
    DegenerateForm,
    DenominatorDivisibleByP,
    DiscriminantZeroToPrecision,
    FieldBudgetExceeded,
    IterationDiverged,
    PrimeTooSmall,
    RepeatedEigenvalue,
    ZeroEigenvalue,
)
from .fields import QQ, GaussianRat, is_prime, residue_hom, roots_with_extension, _lex_of
from .linalg import series_charpoly
from .series import NovikovSeries


# ---------------------------------------------------------------------------
# algebras
# ---------------------------------------------------------------------------

class AlgebraOverNovikov:
    """Structure constants on a normalized basis (every l(x_i) = 0).

    ``table[i][j]`` is the coordinate vector (list of exact NovikovSeries) of
    x_i * x_j; ``unit`` the coordinates of 1.  The element norm is
    l(sum a_i x_i) = max_i (-v(a_i)).
    """

    def __init__(self, field, basis, table, unit, meta=None):
        self.field = field
        self.basis = list(basis)
        self.dim = len(basis)
        self.table = table
        self.unit = unit
        self.meta = dict(meta or {})

    def multiply(self, u, v):
        out = [NovikovSeries.zero(self.field) for _ in range(self.dim)]
        for i, a in enumerate(u):
            if not a.terms:
                continue
            for j, b in enumerate(v):
                if not b.terms:
                    continue
                c = a * b
                for k, s in enumerate(self.table[i][j]):
                    if s.terms:
                        out[k] = out[k] + c * s
        return out

    def scalar(self, lam: NovikovSeries):
        return [lam * s for s in self.unit]

    def basis_vector(self, i: int):
        return [
            NovikovSeries.one(self.field) if j == i else NovikovSeries.zero(self.field)
            for j in range(self.dim)
        ]

    def mult_operator(self, a):
        """Matrix of left multiplication by coordinate vector ``a``."""
        cols = [self.multiply(a, self.basis_vector(j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def norm_level(self, coords) -> Fraction:
        out = None
        for c in coords:
            if c.terms:
                v = -c.terms[0][0]
                out = v if out is None else max(out, v)
        return out if out is not None else Fraction(0)

    def validate(self):
        """Commutativity, associativity and unit axioms on basis triples."""
        for i in range(self.dim):
            xi = self.basis_vector(i)
            u = self.multiply(self.unit, xi)
            if any((a - b).terms for a, b in zip(u, xi)):
                raise CertificateError(f"unit axiom fails on {self.basis[i]}")
            for j in range(self.dim):
                xj = self.basis_vector(j)
                ij = self.multiply(xi, xj)
                ji = self.multiply(xj, xi)
                if any((a - b).terms for a, b in zip(ij, ji)):
                    raise CertificateError(
                        f"commutativity fails on ({self.basis[i]}, {self.basis[j]})"
                    )
                for k in range(self.dim):
                    xk = self.basis_vector(k)
                    lhs = self.multiply(ij, xk)
                    rhs = self.multiply(xi, self.multiply(xj, xk))
                    if any((a - b).terms for a, b in zip(lhs, rhs)):
                        raise CertificateError(
                            f"associativity fails on triple ({i},{j},{k})"
                        )
        return True

    def map_coeffs(self, fn, field) -> "AlgebraOverNovikov":
        return AlgebraOverNovikov(
            field,
            self.basis,
            [
                [[s.map_coeffs(fn, field) for s in cell] for cell in row]
                for row in self.table
            ],
            [s.map_coeffs(fn, field) for s in self.unit],
            self.meta,
        )

    def describe(self):
        return {
            "dim": self.dim,
            "basis": list(self.basis),
            "meta": {k: str(v) for k, v in self.meta.items()},
        }


def mult_operator(A: AlgebraOverNovikov, a):
    return A.mult_operator(a)


def diagonal_algebra(field, values, labels=None) -> AlgebraOverNovikov:
    """The split model Lambda^m with a distinguished diagonal element.

    ``values`` (exact series) become the coordinates of the distinguished
    element under meta["element"]; the basis vectors are idempotents.
    """
    m = len(values)
    labels = labels or [f"e{i+1}" for i in range(m)]
    z = NovikovSeries.zero(field)
    one = NovikovSeries.one(field)
    table = [
        [
            [one if i == j == k else z for k in range(m)]
            for j in range(m)
        ]
        for i in range(m)
    ]
    unit = [one for _ in range(m)]
    A = AlgebraOverNovikov(field, labels, table, unit)
    A.meta["element"] = "diagonal"
    A.meta["element_coords"] = list(values)
    return A


def projective_model_algebra(n: int, field=QQ) -> AlgebraOverNovikov:
    """The small quantum model of complex projective n-space: K[x]/(x^{n+1}-T).

    Basis 1, x, ..., x^n; the distinguished element is the anticanonical
    multiplication (n+1)x, whose eigenvalues are (n+1) zeta T^{1/(n+1)}.
    """
    m = n + 1
    z = NovikovSeries.zero(field)
    T = NovikovSeries.monomial(field, 1)
    one = NovikovSeries.one(field)
    table = []
    for i in range(m):
        row = []
        for j in range(m):
            k = i + j
            coords = [z] * m
            if k < m:
                coords[k] = one
            else:
                coords[k - m] = T  # x^{n+1} = T
            row.append(coords)
        table.append(row)
    unit = [one] + [z] * (m - 1)
    A = AlgebraOverNovikov(field, [f"x^{i}" if i else "1" for i in range(m)], table, unit)
    A.meta["model"] = f"cp{n}"
    return A


def projective_model_element(A: AlgebraOverNovikov):
    """Coordinates of (n+1)x in the projective model."""
    m = A.dim
    coords = [NovikovSeries.zero(A.field) for _ in range(m)]
    coords[1] = NovikovSeries.from_int(A.field, m)
    return coords


# ---------------------------------------------------------------------------
# univariate root lifting over the Novikov field
# ---------------------------------------------------------------------------

def newton_polygon(coeffs):
    """Lower hull segments of {(i, v(c_i))}: list of (i0, i1, slope)."""
    pts = [(i, c.valuation()) for i, c in enumerate(coeffs) if c.terms]
    if len(pts) < 2:
        return []
    hull = [pts[0]]
    for p in pts[1:]:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep the lower hull: drop the middle point when it lies above
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((x1, x2, Fraction(y2 - y1, x2 - x1)))
    return segs


def novikov_poly_roots(coeffs, field, Z, budget: int = 8):
    """All roots of a polynomial with exact series coefficients, to precision Z.

    Requires the roots to be simple at leading order (distinct residue roots
    per polygon segment); raises RepeatedEigenvalue otherwise and
    ZeroEigenvalue when 0 is a root.  Returns (field2, roots as series).
    """
    Z = Fraction(Z)
    coeffs = list(coeffs)
    if not coeffs[0].terms:
        raise ZeroEigenvalue("the polynomial has a zero root (zero constant term)")
    segs = newton_polygon(coeffs)
    work_field = field
    work_coeffs = coeffs
    roots = []
    for i0, i1, slope in segs:
        w = -slope
        v0 = coeffs[i0].valuation()
        residue = []
        for i in range(i0, i1 + 1):
            c = coeffs[i]
            expected = v0 + slope * (i - i0)
            if c.terms and c.valuation() == expected:
                residue.append(c.leading()[1])
            else:
                residue.append(field.zero)
        from . import polys

        res_poly = polys.pnormalize(residue, field)
        fld2, res_roots, emb = roots_with_extension(res_poly, work_field, budget)
        if len(res_roots) < polys.pdeg(res_poly):
            raise FieldBudgetExceeded(
                "residue polynomial does not split within the field budget"
            )
        if len(set(map(_root_key, res_roots))) != len(res_roots):
            raise RepeatedEigenvalue(
                f"repeated residue root on polygon segment of slope {slope}"
            )
        if fld2 != work_field:
            roots = [r.map_coeffs(fld2.embed, fld2) for r in roots]
            work_coeffs = [c.map_coeffs(fld2.embed, fld2) for c in work_coeffs]
            work_field = fld2
        for r in res_roots:
            x0 = NovikovSeries.monomial(work_field, w, r)
            roots.append(_hensel_lift(work_coeffs, x0, work_field, Z))
    if len(roots) != len(coeffs) - 1:
        raise FieldBudgetExceeded(
            f"found {len(roots)} of {len(coeffs) - 1} roots (degenerate polygon?)"
        )
    return work_field, roots


def _root_key(r):
    return repr(r)


def _poly_eval_series(coeffs, x, field):
    acc = NovikovSeries.zero(field)
    power = NovikovSeries.one(field)
    for c in coeffs:
        if c.terms or c.precision is not None:
            acc = acc + c * power
        power = power * x
    return acc


def _poly_deriv_series(coeffs, field):
    out = []
    for i in range(1, len(coeffs)):
        out.append(coeffs[i].scale(field.from_int(i)))
    return out


def _hensel_lift(coeffs, x0, field, Z):
    """Newton-iterate a simple approximate root to residual precision >= Z."""
    dcoeffs = _poly_deriv_series(coeffs, field)
    extra = Fraction(4)
    for _escalation in range(6):
        cap = Z + extra
        x = NovikovSeries(field, x0.terms, x0.terms[0][0] + cap)
        last = None
        for _ in range(64):
            fx = _poly_eval_series(coeffs, x, field)
            if not any(g < Z for g, _ in fx.terms) and (
                fx.precision is None or fx.precision >= Z
            ):
                return x.with_precision(Z)
            dfx = _poly_eval_series(dcoeffs, x, field)
            if not dfx.terms:
                raise IterationDiverged("derivative unresolved at the iterate")
            delta = fx * dfx.invert(cap + dfx.terms[0][0])
            gain = delta.valuation_lower_bound()
            if last is not None and gain <= last:
                break
            last = gain
            x = (x - delta).with_precision(x.precision)
        extra = extra * 2
    raise IterationDiverged(f"Hensel lifting stalled before precision {Z}")


# ---------------------------------------------------------------------------
# semisimplicity certification
# ---------------------------------------------------------------------------

@dataclass
class IdempotentSplit:
    """Certified idempotent splitting of a commutative algebra."""

    field: object
    idempotents: list  # coordinate vectors of series
    eigenvalues: list  # series
    valuations: list   # Fractions: l(e_l)
    precision: Fraction
    notes: dict = dc_field(default_factory=dict)


def certify_semisimple(A: AlgebraOverNovikov, a, Z=Fraction(8), budget: int = 8) -> IdempotentSplit:
    """Split A via an element whose multiplication has distinct nonzero eigenvalues.

    Raises RepeatedEigenvalue / ZeroEigenvalue when the certificate cannot
    exist, FieldBudgetExceeded when the eigenvalues need more field than the
    budget allows.
    """
    Z = Fraction(Z)
    M = A.mult_operator(a)
    charpoly = series_charpoly(M, A.field)
    fld, roots = novikov_poly_roots(charpoly, A.field, Z + 2, budget)
    _check_distinct_nonzero(roots)
    if fld != A.field:
        Aw = A.map_coeffs(fld.embed, fld)
        aw = [s.map_coeffs(fld.embed, fld) for s in a]
    else:
        Aw, aw = A, a
    idempotents = []
    valuations = []
    for l, lam_l in enumerate(roots):
        e = Aw.unit
        for j, lam_j in enumerate(roots):
            if j == l:
                continue
            diff = lam_l - lam_j
            inv = diff.invert(Z + 2 + diff.leading()[0])
            term = [(c - lam_j * u) * inv for c, u in zip(aw, Aw.unit)]
            e = Aw.multiply(e, term)
        e = [c.with_precision(Z) for c in e]
        _assert_idempotent(Aw, e, aw, roots[l], Z)
        idempotents.append(e)
        valuations.append(Aw.norm_level(e))
    return IdempotentSplit(
        field=fld,
        idempotents=idempotents,
        eigenvalues=[r.with_precision(Z) for r in roots],
        valuations=valuations,
        precision=Z,
    )


def _check_distinct_nonzero(roots):
    for i, r in enumerate(roots):
        if not r.terms:
            raise ZeroEigenvalue(f"eigenvalue {i} is zero to working precision")
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if not (roots[i] - roots[j]).terms:
                raise RepeatedEigenvalue(f"eigenvalues {i} and {j} coincide")


def _assert_idempotent(A, e, a, lam, Z):
    ee = A.multiply(e, e)
    for x, y in zip(ee, e):
        d = x - y
        if any(g < Z for g, _ in d.terms):
            raise CertificateError("idempotent identity fails below precision")
    ae = A.multiply(a, e)
    lame = [lam * c for c in e]
    for x, y in zip(ae, lame):
        d = x - y
        if any(g < Z for g, _ in d.terms):
            raise CertificateError("eigenvalue recovery fails below precision")


def discriminant_valuation(A: AlgebraOverNovikov, a):
    """(valuation of disc(f_E), exclusion primes from the leading data).

    The discriminant is computed exactly as the product of squared eigenvalue
    differences... no: directly from the exact resultant Res(f, f'), so the
    answer does not depend on any lifting.  The exclusion set collects primes
    dividing the leading coefficient's integer data and every denominator in
    the algebra's structure constants.
    """
    from .linalg import series_det

    M = A.mult_operator(a)
    f = series_charpoly(M, A.field)
    df = _poly_deriv_series(f, A.field)
    m = len(f) - 1
    if m == 0:
        raise DiscriminantZeroToPrecision("zero-dimensional algebra")
    size = m + (m - 1)
    z = NovikovSeries.zero(A.field)
    S = [[z] * size for _ in range(size)]
    for i in range(m - 1):
        for j, c in enumerate(f):
            S[i][i + (m - j)] = c
    dfp = list(df) + [z] * (m - len(df))
    for i in range(m):
        for j, c in enumerate(dfp):
            S[m - 1 + i][i + (m - 1 - j)] = c
    res = series_det(S, A.field)
    if not res.terms:
        raise DiscriminantZeroToPrecision("Res(f, f') = 0: repeated eigenvalues")
    val, lead = res.leading()
    primes = _leading_primes(lead) | _denominator_primes(A, a)
    return val, sorted(primes)


def _leading_primes(lead):
    from .fields import factorint

    out = set()
    if isinstance(lead, Fraction):
        if abs(lead.numerator) > 1:
            out |= set(factorint(lead.numerator))
        if lead.denominator > 1:
            out |= set(factorint(lead.denominator))
    elif isinstance(lead, GaussianRat):
        n = lead.norm()
        if n.numerator > 1:
            out |= set(factorint(n.numerator))
        if n.denominator > 1:
            out |= set(factorint(n.denominator))
    return out


def _denominator_primes(A: AlgebraOverNovikov, a):
    from .fields import factorint

    out = set()

    def eat(series):
        for _, c in series.terms:
            if isinstance(c, Fraction):
                if c.denominator > 1:
                    out.update(factorint(c.denominator))
            elif isinstance(c, GaussianRat):
                d = c.re.denominator * c.im.denominator
                if d > 1:
                    out.update(factorint(d))

    for row in A.table:
        for cell in row:
            for s in cell:
                eat(s)
    for s in list(A.unit) + list(a):
        eat(s)
    return out


# ---------------------------------------------------------------------------
# mod-p transfer
# ---------------------------------------------------------------------------

def mod_p_transfer(A: AlgebraOverNovikov, a, p: int, Z=Fraction(8), budget: int = 8):
    """Transfer the idempotent splitting to characteristic p at precision Z.

    Returns (IdempotentSplit over the char-p field, report dict).  Raises
    PrimeTooSmall on denominator or discriminant obstructions and
    IterationDiverged when the char-p lift degenerates (a certificate bug,
    not an expected failure, for admissible p).
    """
    if not is_prime(p):
        raise PrimeTooSmall(f"{p} is not prime")
    Z = Fraction(Z)
    disc_val, exclusion = discriminant_valuation(
        A, a
    )
    if p in exclusion:
        raise PrimeTooSmall(
            f"p={p} divides the discriminant/denominator data {exclusion}"
        )
    split0 = certify_semisimple(A, a, Z + 2, budget)
    fld0 = split0.field
    try:
        tgt, fn = residue_hom(fld0, p)
    except DenominatorDivisibleByP as e:
        raise PrimeTooSmall(str(e)) from None
    try:
        Ap = (A.map_coeffs(fld0.embed, fld0) if fld0 != A.field else A).map_coeffs(fn, tgt)
        ap = [
            (s.map_coeffs(fld0.embed, fld0) if fld0 != A.field else s).map_coeffs(fn, tgt)
            for s in a
        ]
        lam_trunc = [lam.truncate(Z) for lam in split0.eigenvalues]
        lam_red = [lam.map_coeffs(fn, tgt) for lam in lam_trunc]
        e_red = [
            [c.truncate(Z).map_coeffs(fn, tgt) for c in e] for e in split0.idempotents
        ]
    except DenominatorDivisibleByP as e:
        raise PrimeTooSmall(str(e)) from None
    # characteristic-p characteristic polynomial and Hensel re-lifting
    Mp = Ap.mult_operator(ap)
    fp = series_charpoly(Mp, tgt)
    lifted = []
    for lam in lam_red:
        if not lam.terms:
            raise IterationDiverged("a reduced eigenvalue vanished (certificate bug)")
        lifted.append(_hensel_lift(fp, lam, tgt, Z + 2))
    _check_distinct_nonzero(lifted)
    idempotents = []
    valuations = []
    defects = []
    for l, lam_l in enumerate(lifted):
        e = Ap.unit
        for j, lam_j in enumerate(lifted):
            if j == l:
                continue
            diff = lam_l - lam_j
            inv = diff.invert(Z + 2 + diff.leading()[0])
            term = [(c - lam_j * u) * inv for c, u in zip(ap, Ap.unit)]
            e = Ap.multiply(e, term)
        e = [c.with_precision(Z) for c in e]
        _assert_idempotent(Ap, e, ap, lam_l, Z)
        idempotents.append(e)
        valuations.append(Ap.norm_level(e))
        # proximity to the reduced truncation: l_p(e - reduce(trunc(e0))) <= -Z + C
        diffs = [x - y for x, y in zip(e, e_red[l])]
        lvl = Ap.norm_level(diffs) if any(d.terms for d in diffs) else None
        defects.append(None if lvl is None else lvl + Z)
    for l, (vp, v0) in enumerate(zip(valuations, split0.valuations)):
        if vp != v0:
            raise CertificateError(
                f"l_p(e_{l}) = {vp} differs from l_0(e_{l}) = {v0} (p={p})"
            )
    split_p = IdempotentSplit(
        field=tgt,
        idempotents=idempotents,
        eigenvalues=lifted,
        valuations=valuations,
        precision=Z,
        notes={"p": p, "observed_defect": max((d for d in defects if d is not None), default=Fraction(0))},
    )
    report = {
        "p": p,
        "disc_valuation": str(disc_val),
        "exclusion_primes": exclusion,
        "ell_0": [str(v) for v in split0.valuations],
        "ell_p": [str(v) for v in valuations],
        "ell_p_equals_ell_0": True,
        "observed_defect_C": str(split_p.notes["observed_defect"]),
    }
    return split_p, report


# ---------------------------------------------------------------------------
# Clifford algebras from Hessians
# ---------------------------------------------------------------------------

def clifford_from_hessian(H, W_value=None) -> AlgebraOverNovikov:
    """The 2^n-dimensional algebra with x_i x_j + x_j x_i = H_ij * unit.

    ``H`` is a symmetric matrix of exact series whose determinant's leading
    term must resolve (DegenerateForm otherwise).  Basis: subsets of {1..n}
    as exterior monomials.  ``W_value`` is carried as metadata.
    """
    n = len(H)
    field = H[0][0].field if n else None
    for i in range(n):
        for j in range(n):
            if (H[i][j] - H[j][i]).terms:
                raise DegenerateForm("Hessian input is not symmetric")
    from .potential import _det_truncated

    det = _det_truncated(H, field)
    if not det.terms:
        raise DegenerateForm("Hessian determinant vanishes (to precision)")
    subsets = []
    for mask in range(1 << n):
        subsets.append(tuple(i for i in range(n) if mask >> i & 1))
    subsets.sort(key=lambda s: (len(s), s))
    index = {s: k for k, s in enumerate(subsets)}
    half = field.one / field.from_int(2)

    def word_product(S, T):
        """Normal form of the concatenated word as {subset: series}."""
        out: dict = {}

        def reduce(word, coeff):
            for pos in range(len(word) - 1):
                a, b = word[pos], word[pos + 1]
                if a == b:
                    rest = word[:pos] + word[pos + 2:]
                    reduce(rest, coeff * H[a][a].scale(half))
                    return
                if a > b:
                    swapped = word[:pos] + (b, a) + word[pos + 2:]
                    reduce(swapped, -coeff)
                    contracted = word[:pos] + word[pos + 2:]
                    reduce(contracted, coeff * H[a][b])
                    return
            key = tuple(word)
            out[key] = out.get(key, NovikovSeries.zero(field)) + coeff
        reduce(tuple(S) + tuple(T), NovikovSeries.one(field))
        return out

    z = NovikovSeries.zero(field)
    table = []
    for S in subsets:
        row = []
        for T in subsets:
            coords = [z] * len(subsets)
            for key, c in word_product(S, T).items():
                coords[index[key]] = coords[index[key]] + c
            row.append(coords)
        table.append(row)
    unit = [NovikovSeries.one(field)] + [z] * (len(subsets) - 1)
    labels = ["1"] + ["x" + "".join(str(i + 1) for i in s) for s in subsets[1:]]
    A = AlgebraOverNovikov(field, labels, table, unit)
    A.meta["det_hessian_val"] = det.leading()[0]
    if W_value is not None:
        A.meta["critical_value"] = W_value
    return A
