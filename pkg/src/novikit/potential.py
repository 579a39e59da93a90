"""Bulk-deformed superpotentials on moment polytopes and their critical points.

The potential of a polytope {<u,v_j> >= lambda_j} with bulk weights c_j is
W = sum_j c_j T^{-lambda_j} y^{v_j}.  Critical points solve y_i dW/dy_i = 0
over the Novikov field; they are found in three stages:

1. tropical pre-solve: candidate valuation vectors w from balancing pairs of
   monomial valuations in each equation (brute force over pairs, exact
   rational linear algebra);
2. leading-coefficient systems over the residue field at each candidate,
   solved exactly (binomial systems via integer Smith form and root
   adjunction; univariate and bivariate fallbacks via resultants);
3. quadratically convergent Newton lifting in T-adic precision, with an
   exact residual certificate v(y_i d_i W (eta)) >= Z on every output.

Completeness is certified a posteriori against the Kouchnirenko bound; a
shortfall is reported on the result, never silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product as iproduct

from .errors import (
    BoundaryCase,
    CertificateError,
    FieldBudgetExceeded,
    JacobianDegenerateAtLeadingOrder,
    NotInterior,
    ParseError,
    PrecisionInsufficient,
    SearchExhausted,
)
from .fields import QI, GaussianRat, roots_with_extension
from .laurent import NovikovLaurentPoly
from .linalg import series_det
from .polytope import Polytope
from .series import INF, NovikovSeries
from . import polys


# ---------------------------------------------------------------------------
# bulk deformations and potentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BulkDeformation:
    """Nonzero Gaussian-integer weights, one per facet.

    Zero weights are rejected: they delete a monomial and change the Newton
    polytope, outside the genericity regime this artifact certifies.
    """

    c: tuple

    def __post_init__(self):
        for z in self.c:
            if not isinstance(z, GaussianRat) or not z.is_gaussian_integer():
                raise ParseError(f"bulk coefficient {z!r} is not a Gaussian integer")
            if z.norm() == 0:
                raise ParseError("bulk coefficients must be nonzero")

    @classmethod
    def trivial(cls, N: int):
        return cls(tuple(GaussianRat(1) for _ in range(N)))

    @classmethod
    def parse(cls, text: str, N: int | None = None):
        """Parse "c1,...,cN" with entries like 2, -1+i, 3i."""
        items = [t.strip() for t in text.split(",") if t.strip()]
        if N is not None and len(items) != N:
            raise ParseError(f"expected {N} bulk coefficients, got {len(items)}")
        return cls(tuple(_parse_gaussian(t) for t in items))

    def describe(self):
        return [repr(z) for z in self.c]


def _parse_gaussian(text: str) -> GaussianRat:
    t = text.replace(" ", "")
    if not t:
        raise ParseError("empty bulk coefficient")
    # split into real and imaginary pieces; forms: a, bi, a+bi, a-bi
    re_part, im_part = 0, 0
    token = ""
    pieces = []
    for ch in t:
        if ch in "+-" and token and token[-1] not in "+-":
            pieces.append(token)
            token = ch
        else:
            token += ch
    pieces.append(token)
    try:
        for piece in pieces:
            if piece.endswith(("i", "I")):
                body = piece[:-1]
                if body in ("", "+"):
                    im_part += 1
                elif body == "-":
                    im_part -= 1
                else:
                    im_part += int(body)
            else:
                re_part += int(piece)
    except ValueError:
        raise ParseError(f"cannot parse Gaussian integer {text!r}") from None
    return GaussianRat(re_part, im_part)


def build_ghv(P: Polytope, b: BulkDeformation) -> NovikovLaurentPoly:
    """The bulk-weighted superpotential sum_j c_j T^{-lambda_j} y^{v_j}."""
    if len(b.c) != P.N:
        raise ParseError(f"bulk has {len(b.c)} weights, polytope has {P.N} facets")
    mons = []
    for (v, lam), cj in zip(P.facets, b.c):
        mons.append((tuple(v), NovikovSeries.monomial(QI, -lam, cj)))
    return NovikovLaurentPoly(QI, P.n, mons)


def build_fiber_potential(P: Polytope, b: BulkDeformation, u) -> NovikovLaurentPoly:
    """The potential seen from the torus fiber over an interior point u."""
    if not P.is_interior(u):
        raise NotInterior(f"{u} is not interior")
    return build_ghv(P, b).substitute_fiber(u)


# ---------------------------------------------------------------------------
# critical points
# ---------------------------------------------------------------------------

@dataclass
class CriticalPoint:
    """A lifted critical point with its exact certificates."""

    eta: tuple  # of NovikovSeries
    precision: Fraction
    val_vector: tuple  # of Fraction
    critical_value: NovikovSeries
    hessian_val: Fraction | None = None
    inside: bool | None = None

    def leading_coeffs(self):
        return tuple(s.leading()[1] for s in self.eta)


@dataclass
class SolverReport:
    """Everything the solver can certify about one potential."""

    points: list
    field: object
    precision: Fraction
    kouchnirenko: int | None = None
    saturated: bool | None = None
    notes: list = dc_field(default_factory=list)


def critical_points(W: NovikovLaurentPoly, precision, field_budget: int = 8,
                    newton_bound: int | None = None) -> list:
    """All critical points of W to T-adic precision ``precision``.

    Raises JacobianDegenerateAtLeadingOrder when a branch is non-Morse at
    leading order, FieldBudgetExceeded when a leading system needs more
    field than the budget allows.
    """
    return solve_critical_points(W, precision, field_budget, newton_bound).points


def solve_critical_points(W: NovikovLaurentPoly, precision, field_budget: int = 8,
                          newton_bound: int | None = None) -> SolverReport:
    Z = Fraction(precision)
    n = W.nvars
    Gs = W.log_derivatives()
    if any(not g.monomials for g in Gs):
        raise JacobianDegenerateAtLeadingOrder(
            "a log-derivative vanishes identically (potential independent of a variable)"
        )
    candidates = _tropical_candidates(Gs, n)
    work_field = W.field
    branches = []  # (w, leading systems)
    for w in candidates:
        systems = _leading_systems(Gs, w)
        if systems is None:
            continue
        branches.append((w, systems))
    # solve all leading systems, upgrading the shared field as needed
    solved = []
    for w, systems in branches:
        fld, sols = _solve_leading_systems(systems, work_field, field_budget)
        if fld != work_field:
            work_field = fld
            solved = [
                (w0, [_embed_vec(r, fld) for r in rs], fld) for (w0, rs, _f) in solved
            ]
        solved.append((w, [list(r) for r in sols], work_field))
    # embed stragglers solved over a smaller field
    final = []
    for w, rs, fld in solved:
        if fld != work_field:
            rs = [_embed_vec(r, work_field) for r in rs]
        final.append((w, rs))
    W_work = _embed_poly(W, work_field)
    Gs_work = W_work.log_derivatives()
    jac = [[g.log_derivative(j) for j in range(n)] for g in Gs_work]
    pts = []
    for w, rs in final:
        for r in rs:
            eta0 = tuple(
                NovikovSeries.monomial(work_field, wi, ri) for wi, ri in zip(w, r)
            )
            eta = _newton_lift(Gs_work, jac, eta0, work_field, Z, newton_bound)
            value = W_work.evaluate(eta, Z + max(Fraction(0), -min(w)) + 1)
            pts.append(
                CriticalPoint(
                    eta=eta,
                    precision=Z,
                    val_vector=tuple(w),
                    critical_value=value.with_precision(Z),
                )
            )
    pts = _dedupe_points(pts)
    pts.sort(key=_point_key)
    return SolverReport(points=pts, field=work_field, precision=Z)


def _point_key(pt: CriticalPoint):
    from .fields import _lex_of

    return (pt.val_vector, tuple(_lex_of(c) for c in pt.leading_coeffs()))


def _dedupe_points(pts):
    seen = set()
    out = []
    for p in pts:
        key = (p.val_vector, tuple(repr(c) for c in p.leading_coeffs()))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _embed_vec(r, fld):
    return [fld.embed(x) if not isinstance(x, type(fld.zero)) else x for x in r]


def _embed_poly(W: NovikovLaurentPoly, fld) -> NovikovLaurentPoly:
    if W.field == fld:
        return W
    return W.map_coeffs(fld.embed, fld)


# -- stage 1: tropical candidates ---------------------------------------------

def _monomial_data(G: NovikovLaurentPoly):
    out = []
    for a, c in G.items():
        out.append((a, c.valuation()))
    return out


def _tropical_candidates(Gs, n):
    """Candidate valuation vectors from balancing one pair per equation."""
    data = [_monomial_data(g) for g in Gs]
    pair_sets = []
    for mons in data:
        pairs = []
        for i in range(len(mons)):
            for j in range(i + 1, len(mons)):
                pairs.append((mons[i], mons[j]))
        if not pairs:
            return []
        pair_sets.append(pairs)
    seen = set()
    out = []
    for combo in iproduct(*pair_sets):
        rows = []
        rhs = []
        for (a1, v1), (a2, v2) in combo:
            rows.append([Fraction(x - y) for x, y in zip(a1, a2)])
            rhs.append(v2 - v1)
        w = _solve_square(rows, rhs, n)
        if w is None:
            continue
        key = tuple(w)
        if key in seen:
            continue
        seen.add(key)
        if _feasible(data, w):
            out.append(list(w))
    out.sort()
    return out


def _solve_square(rows, rhs, n):
    m = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col]
        m[col] = [x / inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _feasible(data, w):
    """Every equation's minimal monomial valuation is attained at least twice."""
    for mons in data:
        vals = [v + sum((Fraction(e) * x for e, x in zip(a, w)), Fraction(0)) for a, v in mons]
        mn = min(vals)
        if sum(1 for v in vals if v == mn) < 2:
            return False
    return True


# -- stage 2: leading systems --------------------------------------------------

def _leading_systems(Gs, w):
    """Per equation, the argmin monomials with their leading coefficients."""
    systems = []
    for g in Gs:
        entries = []
        best = INF
        for a, c in g.items():
            val = c.valuation() + sum(
                (Fraction(e) * x for e, x in zip(a, w)), Fraction(0)
            )
            entries.append((a, val, c.leading()[1]))
            best = min(best, val)
        argmin = [(a, lead) for a, val, lead in entries if val == best]
        if len(argmin) < 2:
            return None
        systems.append(argmin)
    return systems


def _solve_leading_systems(systems, field, budget):
    """(field2, solutions): nonzero residue solutions of the leading systems."""
    n = len(systems)
    if all(len(s) == 2 for s in systems):
        return _solve_binomial(systems, field, budget)
    if n == 1:
        return _solve_univariate(systems[0], field, budget)
    if n == 2:
        return _solve_bivariate(systems, field, budget)
    raise FieldBudgetExceeded(
        f"leading system with {n} variables and a non-binomial equation is beyond desk scale"
    )


def _solve_binomial(systems, field, budget):
    """r^A = d via integer Smith diagonalization and root adjunction."""
    n = len(systems)
    A = []
    d = []
    for (a1, c1), (a2, c2) in systems:
        A.append([x - y for x, y in zip(a1, a2)])
        d.append(-(c2 / c1))
    U, D, V = _int_diagonalize(A)
    if any(D[i][i] == 0 for i in range(n)):
        return field, []  # degenerate branch: no isolated solutions here
    Uinv = _int_inverse(U)
    Vinv = _int_inverse(V)
    e = [_monomial_power(d, Uinv[i], field) for i in range(n)]
    per_coord = []
    cur_field = field
    emb_all = lambda x: x  # noqa: E731
    for i in range(n):
        m = D[i][i]
        target = e[i]
        if m < 0:
            m = -m
            target = cur_field.one / target
        target = emb_all(target) if False else target
        poly = [-target] + [cur_field.zero] * (m - 1) + [cur_field.one]
        fld2, roots, emb = roots_with_extension(tuple(poly), cur_field, budget)
        if fld2 != cur_field:
            per_coord = [[emb(r) for r in rs] for rs in per_coord]
            e = [emb(x) for x in e]
            d = [emb(x) for x in d]
            cur_field = fld2
        per_coord.append(roots)
    sols = []
    for s in iproduct(*per_coord):
        r = [_monomial_power(list(s), Vinv_row, cur_field) for Vinv_row in Vinv]
        sols.append(r)
    return cur_field, _unique_vectors(sols)


def _monomial_power(vals, exps, field):
    out = field.one
    for v, k in zip(vals, exps):
        if k == 0:
            continue
        base = v if k > 0 else field.one / v
        for _ in range(abs(k)):
            out = out * base
    return out


def _unique_vectors(sols):
    out = []
    for s in sols:
        if not any(all(a == b for a, b in zip(s, t)) for t in out):
            out.append(s)
    return out


def _residue_poly_1var(argmin, field, var_index=0):
    exps = [a[var_index] for a, _c in argmin]
    lo = min(exps)
    deg = max(exps) - lo
    coeffs = [field.zero] * (deg + 1)
    for (a, c) in argmin:
        coeffs[a[var_index] - lo] = coeffs[a[var_index] - lo] + c
    return polys.pnormalize(coeffs, field)


def _solve_univariate(argmin, field, budget):
    poly = _residue_poly_1var(argmin, field)
    fld, roots, _ = roots_with_extension(poly, field, budget)
    roots = [r for r in roots if r != fld.zero]
    return fld, _unique_vectors([[r] for r in roots])


def _solve_bivariate(systems, field, budget):
    """Two equations in (r1, r2): eliminate r2 by an exact resultant."""
    f = _laurent_to_bipoly(systems[0], field)
    g = _laurent_to_bipoly(systems[1], field)
    res = _resultant_in_r2(f, g, field)
    if not res:
        raise FieldBudgetExceeded("resultant vanished: leading system not zero-dimensional")
    fld, r1_roots, emb = roots_with_extension(res, field, budget)
    r1_roots = [r for r in r1_roots if r != fld.zero]
    sols = []
    for r1 in _unique_vectors([[r] for r in r1_roots]):
        r1 = r1[0]
        f1 = _substitute_r1(f, r1, fld, emb)
        g1 = _substitute_r1(g, r1, fld, emb)
        h = polys.pgcd(f1, g1, fld)
        if polys.pdeg(h) < 1:
            continue
        fld2, r2_roots, emb2 = roots_with_extension(h, fld, budget)
        if fld2 != fld:
            sols = [[emb2(a), emb2(b)] for a, b in sols]
            r1 = emb2(r1)
            fld = fld2
            f = [[emb2(c) for c in row] for row in f]
            g = [[emb2(c) for c in row] for row in g]
            old_emb = emb
            emb = lambda x, _o=old_emb, _e=emb2: _e(_o(x))  # noqa: E731
        for r2 in r2_roots:
            if r2 != fld.zero:
                sols.append([r1, r2])
    return fld, _unique_vectors(sols)


def _laurent_to_bipoly(argmin, field):
    """Cleared polynomial as nested coeff lists: rows = power of r1, cols r2."""
    lo1 = min(a[0] for a, _ in argmin)
    lo2 = min(a[1] for a, _ in argmin)
    d1 = max(a[0] for a, _ in argmin) - lo1
    d2 = max(a[1] for a, _ in argmin) - lo2
    grid = [[field.zero] * (d2 + 1) for _ in range(d1 + 1)]
    for a, c in argmin:
        grid[a[0] - lo1][a[1] - lo2] = grid[a[0] - lo1][a[1] - lo2] + c
    return grid


class _PolyRing:
    """Field-like handle for tuple-polynomials (for generic elimination)."""

    def __init__(self, field):
        self.field = field
        self.zero = ()
        self.one = polys.pconst(field.one, field)


def _resultant_in_r2(f, g, field):
    """Resultant of f, g in r2; result a tuple-polynomial in r1."""
    fr = _bipoly_cols(f, field)
    gr = _bipoly_cols(g, field)
    m, n = len(fr) - 1, len(gr) - 1
    if m < 1 and n < 1:
        return ()
    size = m + n
    ring = _PolyRing(field)
    S = [[ring.zero] * size for _ in range(size)]
    for i in range(n):
        for j, c in enumerate(fr):
            S[i][i + (m - j)] = c
    for i in range(m):
        for j, c in enumerate(gr):
            S[n + i][i + (n - j)] = c
    return _poly_det(S, field)


def _bipoly_cols(grid, field):
    """Coefficients in r2 (highest first), each a tuple-polynomial in r1."""
    d2 = len(grid[0]) - 1
    cols = []
    for j in range(d2, -1, -1):
        cols.append(polys.pnormalize([grid[i][j] for i in range(len(grid))], field))
    return cols


def _poly_det(S, field):
    """Bareiss determinant over the polynomial ring K[r1] (exact divisions)."""
    n = len(S)
    if n == 0:
        return polys.pconst(field.one, field)
    m = [row[:] for row in S]
    sign = 1
    prev = polys.pconst(field.one, field)
    for k in range(n - 1):
        if not m[k][k]:
            swap = None
            for i in range(k + 1, n):
                if m[i][k]:
                    swap = i
                    break
            if swap is None:
                return ()
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = polys.psub(
                    polys.pmul(m[i][j], m[k][k], field),
                    polys.pmul(m[i][k], m[k][j], field),
                    field,
                )
                q, r = polys.pdivmod(num, prev, field)
                assert not r, "Bareiss division must be exact"
                m[i][j] = q
            m[i][k] = ()
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return polys.pneg(det, field) if sign < 0 else det


def _substitute_r1(grid, r1, fld, emb):
    """Substitute r1-value into the bipoly; univariate in r2 over fld."""
    out = []
    for j in range(len(grid[0])):
        acc = fld.zero
        power = fld.one
        for i in range(len(grid)):
            acc = acc + emb(grid[i][j]) * power
            power = power * r1
        out.append(acc)
    return polys.pnormalize(out, fld)


# -- integer Smith diagonalization ---------------------------------------------

def _int_diagonalize(A):
    """U, D, V unimodular/diagonal integers with A = U @ D @ V."""
    n = len(A)
    m = len(A[0])
    D = [row[:] for row in A]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    V = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def row_sub(i, j, q):  # row_i -= q row_j  (on D); U gets col_j += q col_i
        D[i] = [a - q * b for a, b in zip(D[i], D[j])]
        for r in range(n):
            U[r][j] += q * U[r][i]

    def col_sub(j, i, q):  # col_j -= q col_i; V gets row_i += q row_j
        for r in range(m if False else len(D)):
            D[r][j] -= q * D[r][i]
        V[i] = [a + q * b for a, b in zip(V[i], V[j])]

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        for r in range(n):
            U[r][i], U[r][j] = U[r][j], U[r][i]

    def col_swap(i, j):
        for r in range(len(D)):
            D[r][i], D[r][j] = D[r][j], D[r][i]
        V[i], V[j] = V[j], V[i]

    size = min(n, m)
    for t in range(size):
        while True:
            # locate the smallest nonzero entry in the working block
            best = None
            for i in range(t, n):
                for j in range(t, m):
                    if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            bi, bj = best
            if bi != t:
                row_swap(t, bi)
            if bj != t:
                col_swap(t, bj)
            done = True
            for i in range(t + 1, n):
                if D[i][t] != 0:
                    row_sub(i, t, D[i][t] // D[t][t])
                    done = done and D[i][t] == 0
            for j in range(t + 1, m):
                if D[t][j] != 0:
                    col_sub(j, t, D[t][j] // D[t][t])
                    done = done and D[t][j] == 0
            if done and all(D[i][t] == 0 for i in range(t + 1, n)) and all(
                D[t][j] == 0 for j in range(t + 1, m)
            ):
                break
    return U, D, V


def _int_inverse(M):
    """Exact inverse of a unimodular integer matrix (as integer matrix)."""
    n = len(M)
    a = [[Fraction(M[i][j]) for j in range(n)] + [Fraction(1 if j == i else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col] != 0:
                piv = r
                break
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = []
    for i in range(n):
        row = a[i][n:]
        assert all(x.denominator == 1 for x in row)
        out.append([int(x) for x in row])
    return out


# -- stage 3: Newton lifting ----------------------------------------------------

def _newton_lift(Gs, jac, eta0, field, Z, newton_bound=None):
    """Lift a leading-order solution until every residual is certified >= Z."""
    n = len(eta0)
    extra = Fraction(4)
    for _escalation in range(6):
        cap = Z + extra
        eta = tuple(s.with_precision(cap) for s in eta0)
        # seed the cap: leading terms are exact, the rest unknown
        eta = tuple(
            NovikovSeries(field, s.terms, s.terms[0][0] + cap) for s in eta
        )
        last_gain = None
        for _it in range(newton_bound or 48):
            residuals = [g.evaluate(eta, cap) for g in Gs]
            if all(_certified_at(r, Z) for r in residuals):
                return tuple(s.with_precision(Z) for s in eta)
            M = [[jac[i][j].evaluate(eta, cap) for j in range(n)] for i in range(n)]
            rhs = [-r for r in residuals]
            eps = _solve_truncated(M, rhs, field, cap)
            if eps is None:
                raise JacobianDegenerateAtLeadingOrder(
                    "log-Jacobian not invertible at leading order"
                )
            gain = min(e.valuation_lower_bound() for e in eps)
            if last_gain is not None and gain <= last_gain:
                break  # stalled at this cap: escalate
            last_gain = gain
            eta = tuple(
                s * (NovikovSeries.one(field) + e) for s, e in zip(eta, eps)
            )
        extra = extra * 2
    raise PrecisionInsufficient(
        f"Newton lifting could not certify residuals >= {Z}"
    )


def _certified_at(r: NovikovSeries, Z) -> bool:
    if any(g < Z for g, _ in r.terms):
        return False
    return r.precision is None or r.precision >= Z


def _solve_truncated(M, rhs, field, cap):
    """Solve M x = rhs with truncated series by min-valuation pivoting."""
    n = len(M)
    a = [[M[i][j] for j in range(n)] + [rhs[i]] for i in range(n)]
    perm = list(range(n))
    for col in range(n):
        piv = None
        best = None
        for r in range(col, n):
            e = a[r][col]
            if e.terms:
                v = e.terms[0][0]
                if best is None or v < best:
                    best = v
                    piv = r
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].invert(cap + best)
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col].terms:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    _ = perm
    return [a[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def hessian_certificate(W: NovikovLaurentPoly, pt: CriticalPoint):
    """(log-Hessian matrix at the point, valuation of its determinant).

    Nondegenerate iff the determinant's leading term resolves below the
    working precision; otherwise PrecisionInsufficient.
    """
    n = W.nvars
    Wf = _embed_poly(W, pt.eta[0].field)
    H = [
        [Wf.log_derivative(i).log_derivative(j) for j in range(n)] for i in range(n)
    ]
    cap = pt.precision + 1
    Hval = [[H[i][j].evaluate(pt.eta, cap) for j in range(n)] for i in range(n)]
    det = _det_truncated(Hval, pt.eta[0].field)
    if not det.terms:
        raise PrecisionInsufficient(
            "log-Hessian determinant unresolved at this precision (degenerate?)"
        )
    val = det.terms[0][0]
    pt.hessian_val = val
    return Hval, val


def _det_truncated(M, field):
    from itertools import permutations

    n = len(M)
    total = NovikovSeries.zero(field)
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = NovikovSeries.one(field)
        for i in range(n):
            term = term * M[i][perm[i]]
        total = total + (term if sign > 0 else -term)
    return total


def certify_convenient(W: NovikovLaurentPoly, precision=Fraction(5),
                       field_budget: int = 8, max_doublings: int = 3):
    """{morse, distinct_values} for W, escalating precision up to a cap.

    Returns (certificate dict, solver report).  Distinctness of critical
    values is certified up to the working precision; if differences stay
    unresolved after the escalations, PrecisionInsufficient propagates.
    """
    Z = Fraction(precision)
    last_err = None
    for _ in range(max_doublings + 1):
        report = solve_critical_points(W, Z, field_budget)
        try:
            morse = True
            for pt in report.points:
                hessian_certificate(W, pt)
            distinct = _distinct_values(report.points, Z)
            return {"morse": morse, "distinct_values": distinct}, report
        except PrecisionInsufficient as e:
            last_err = e
            Z = Z * 2
    raise last_err or PrecisionInsufficient("certification failed")


def _distinct_values(points, Z) -> bool:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            diff = points[i].critical_value - points[j].critical_value
            if diff.terms:
                continue
            if diff.precision is not None:
                raise PrecisionInsufficient(
                    f"critical values {i},{j} agree to precision {diff.precision}"
                )
            return False
    return True


def classify_inside(points, P: Polytope, *, expected_inside=None):
    """Partition critical points by the tropical position of val_vector.

    Marks each point's ``inside`` flag; raises BoundaryCase when a support
    value vanishes exactly, and CertificateError when a Morse count is
    expected and violated.
    """
    inside, outside = [], []
    for pt in points:
        vals = P.support_values(pt.val_vector)
        if any(v == 0 for v in vals):
            raise BoundaryCase(
                f"valuation vector {pt.val_vector} lies on the boundary"
            )
        if all(v > 0 for v in vals):
            pt.inside = True
            inside.append(pt)
        else:
            pt.inside = False
            outside.append(pt)
    if expected_inside is not None and len(inside) != expected_inside:
        raise CertificateError(
            f"Morse potential should have {expected_inside} interior critical "
            f"points, found {len(inside)}"
        )
    return inside, outside


# ---------------------------------------------------------------------------
# convenient bulk search
# ---------------------------------------------------------------------------

def search_convenient_bulk(P: Polytope, norm_bound: int = 3, trials: int = 64,
                           seed: int = 0, precision=Fraction(5),
                           field_budget: int = 8):
    """First bulk (deterministic in ``seed``) whose potential certifies convenient.

    Candidate 0 is the all-ones bulk; later candidates draw Gaussian integers
    with |Re|,|Im| <= norm_bound from a seeded generator.  Candidates whose
    certification exceeds the field budget are skipped (logged), per ledger.
    """
    import random

    rng = random.Random(seed)
    tried = set()
    skipped = []

    def candidates():
        yield BulkDeformation.trivial(P.N)
        while True:
            c = []
            for _ in range(P.N):
                while True:
                    re = rng.randint(-norm_bound, norm_bound)
                    im = rng.randint(-norm_bound, norm_bound)
                    if re or im:
                        break
                c.append(GaussianRat(re, im))
            yield BulkDeformation(tuple(c))

    count = 0
    for b in candidates():
        if count >= trials:
            break
        key = tuple((z.re, z.im) for z in b.c)
        if key in tried:
            continue
        tried.add(key)
        count += 1
        try:
            cert, report = certify_convenient(W=build_ghv(P, b), precision=precision,
                                              field_budget=field_budget)
        except (FieldBudgetExceeded, JacobianDegenerateAtLeadingOrder,
                PrecisionInsufficient) as e:
            skipped.append((b.describe(), type(e).__name__))
            continue
        if cert["morse"] and cert["distinct_values"]:
            return b
    raise SearchExhausted(
        f"no convenient bulk within {trials} candidates (skipped {len(skipped)})"
    )


# ---------------------------------------------------------------------------
# disk weights and the evaluation map on monomials
# ---------------------------------------------------------------------------

def disk_weight(I, u, P: Polytope, b: BulkDeformation, y):
    """(series, maslov): the weight prod_j (c_j T^{l_j(u)} y^{v_j})^{alpha_j}.

    ``y`` is the point (tuple of nonzero series); the Maslov index is 2|I|.
    """
    if not P.is_interior(u):
        raise NotInterior(f"{u} is not interior")
    field = y[0].field if y else QI
    lvals = P.support_values(u)
    total = NovikovSeries.one(field)
    weight_prec = Fraction(64)
    for j, alpha in enumerate(I):
        if alpha == 0:
            continue
        v, _lam = P.facets[j]
        cj = b.c[j] if field == QI else field.embed(b.c[j])
        mono = NovikovSeries.monomial(field, lvals[j], cj)
        term = mono
        for i, e in enumerate(v):
            if e > 0:
                term = term * (y[i] ** e)
            elif e < 0:
                term = term * (y[i].invert(weight_prec) ** (-e))
        for _ in range(alpha):
            total = total * term
    maslov = 2 * sum(int(a) for a in I)
    return total, maslov


def _fiber_term_at(P, b, j, pt: CriticalPoint):
    """W_{b,j} evaluated at a critical point (the GHV monomial j at eta)."""
    field = pt.eta[0].field
    v, lam = P.facets[j]
    cj = b.c[j] if field == QI else field.embed(b.c[j])
    term = NovikovSeries.monomial(field, -lam, cj)
    cap = pt.precision + max(Fraction(0), -min(pt.val_vector)) * max(
        1, max(abs(e) for e in v)
    ) + 1
    for i, e in enumerate(v):
        if e > 0:
            term = term * (pt.eta[i] ** e)
        elif e < 0:
            term = term * (pt.eta[i].invert(cap) ** (-e))
    return term


def ks_evaluate(I, P: Polytope, b: BulkDeformation, points):
    """The monomial z^I evaluated across critical points: prod_j W_{b,j}^{alpha_j}."""
    out = []
    for pt in points:
        field = pt.eta[0].field
        acc = NovikovSeries.one(field)
        for j, alpha in enumerate(I):
            if alpha == 0:
                continue
            wj = _fiber_term_at(P, b, j, pt)
            for _ in range(int(alpha)):
                acc = acc * wj
        out.append(acc.with_precision(pt.precision))
    return out


def ks_surjectivity_check(monomial_list, P: Polytope, b: BulkDeformation, points) -> int:
    """Rank of [z^I evaluated at each point] by valuation-pivoted elimination."""
    if not points:
        return 0
    rows = [ks_evaluate(I, P, b, points) for I in monomial_list]
    field = points[0].eta[0].field
    cap = points[0].precision
    rank = 0
    cols = list(range(len(points)))
    work = [row[:] for row in rows]
    for _ in range(len(points)):
        piv = None
        best = None
        for ri, row in enumerate(work):
            for ci in cols:
                e = row[ci]
                if e.terms:
                    v = e.terms[0][0]
                    if best is None or v < best:
                        best, piv = v, (ri, ci)
        if piv is None:
            break
        ri, ci = piv
        rank += 1
        inv = work[ri][ci].invert(cap + best)
        prow = [x * inv for x in work[ri]]
        nxt = []
        for rj, row in enumerate(work):
            if rj == ri:
                continue
            f = row[ci]
            if f.terms:
                nxt.append([x - f * y for x, y in zip(row, prow)])
            else:
                nxt.append(row)
        work = nxt
        cols.remove(ci)
    return rank


def monomials_up_to_degree(N: int, dmax: int):
    """All multiindices I in Z_{>=0}^N with |I| <= dmax, graded lex order."""
    out = []

    def rec(prefix, remaining, budget):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for k in range(budget + 1):
            rec(prefix + [k], remaining - 1, budget - k)

    for total in range(dmax + 1):
        for combo in _compositions(total, N):
            out.append(combo)
    _ = rec
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
