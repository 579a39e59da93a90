"""Exact linear algebra over Novikov series and their fraction field.

Three layers:

* generic Gaussian elimination over any coefficient field (used for residue
  systems over Q(i)/F_{p^k} and, through ``SeriesFrac``, over the fraction
  field of exact series);
* invariant factors of a matrix over the valuation ring (valuations of the
  Smith-form diagonal), computed by minimal-valuation pivoting with a
  truncation cap that escalates until every pivot is resolved — this is the
  engine behind barcodes and torsion exponents;
* non-Archimedean Gram-Schmidt and level-minimizing reduction, the engine
  behind spectral invariants and the direct boundary-depth oracle.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import PrecisionInsufficient
from .series import INF, NovikovSeries


# ---------------------------------------------------------------------------
# generic field elimination
# ---------------------------------------------------------------------------

def rref(rows, zero):
    """Row-reduce in place over a field; returns the list of pivot columns."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c] != zero:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != zero:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def field_rank(matrix, zero) -> int:
    rows = [list(r) for r in matrix]
    return len(rref(rows, zero))


def kernel_basis(matrix, zero, one):
    """Basis of the right kernel of ``matrix`` over its coefficient field."""
    if not matrix:
        return []
    rows = [list(r) for r in matrix]
    ncols = len(rows[0])
    pivots = rref(rows, zero)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [zero] * ncols
        vec[fc] = one
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(vec)
    return basis


def solve_linear(matrix, rhs, zero):
    """One solution of matrix * x = rhs over a field, or None."""
    if not matrix:
        return None if any(b != zero for b in rhs) else []
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    ncols = len(matrix[0])
    pivots = rref(rows, zero)
    if ncols in pivots:
        return None  # inconsistent
    x = [zero] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][ncols]
    return x


def solve_in_span(vectors, target, zero):
    """Coefficients expressing ``target`` in the span of ``vectors``, or None."""
    if not vectors:
        return None if any(t != zero for t in target) else []
    matrix = [[vectors[j][i] for j in range(len(vectors))] for i in range(len(target))]
    return solve_linear(matrix, list(target), zero)


# ---------------------------------------------------------------------------
# fraction field of exact series
# ---------------------------------------------------------------------------

class SeriesFrac:
    """num/den with exact NovikovSeries entries; den nonzero.

    A lightweight fraction field: enough to run exact Gaussian elimination
    over the Novikov field without expanding infinite series.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: NovikovSeries, den: NovikovSeries | None = None):
        if den is None:
            den = NovikovSeries.one(num.field)
        if not den.terms:
            raise ZeroDivisionError("SeriesFrac with zero denominator")
        # normalize: pull out T^v and make the denominator's lead 1
        shift = min(num.terms[0][0] if num.terms else den.terms[0][0], den.terms[0][0])
        num = num.shift(-shift)
        den = den.shift(-shift)
        lead = den.terms[0][1]
        inv = num.field.one / lead
        self.num = num.scale(inv)
        self.den = den.scale(inv)

    @classmethod
    def zero_of(cls, field):
        return cls(NovikovSeries.zero(field))

    def is_zero(self) -> bool:
        return not self.num.terms

    def valuation(self):
        if not self.num.terms:
            return INF
        return self.num.terms[0][0] - self.den.terms[0][0]

    def leading_coeff(self):
        return self.num.terms[0][1] / self.den.terms[0][1]

    def __add__(self, other):
        if not isinstance(other, SeriesFrac):
            return NotImplemented
        return SeriesFrac(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self):
        return SeriesFrac(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NovikovSeries):
            other = SeriesFrac(other)
        if not isinstance(other, SeriesFrac):
            return NotImplemented
        return SeriesFrac(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if not isinstance(other, SeriesFrac):
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero SeriesFrac")
        return SeriesFrac(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self.is_zero()
            return NotImplemented
        if not isinstance(other, SeriesFrac):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def expand(self, precision) -> NovikovSeries:
        """The series expansion to the requested precision horizon."""
        if len(self.den.terms) == 1 and self.den.precision is None:
            g, c = self.den.terms[0]
            return self.num.shift(-g).scale(self.num.field.one / c)
        return self.num * self.den.invert(Fraction(precision) + self.den.terms[0][0])

    def __repr__(self):
        return f"({self.num!r})/({self.den!r})"


class _FracFieldHandle:
    """Duck-typed field handle for SeriesFrac matrices."""

    def __init__(self, field):
        self.field = field

    @property
    def zero(self):
        return SeriesFrac.zero_of(self.field)

    @property
    def one(self):
        return SeriesFrac(NovikovSeries.one(self.field))


def series_matrix_rank(matrix, field) -> int:
    """Rank over the Novikov field of a matrix of exact NovikovSeries."""
    if not matrix or not matrix[0]:
        return 0
    h = _FracFieldHandle(field)
    rows = [[SeriesFrac(e) for e in r] for r in matrix]
    return field_rank(rows, h.zero)


def series_solve(matrix, rhs, field):
    """Solve M x = rhs over the fraction field; x as SeriesFrac list or None."""
    h = _FracFieldHandle(field)
    rows = [[SeriesFrac(e) for e in r] for r in matrix]
    b = [SeriesFrac(e) for e in rhs]
    return solve_linear(rows, b, h.zero)


def series_kernel(matrix, field):
    """Right-kernel basis, denominators cleared back to exact series."""
    h = _FracFieldHandle(field)
    rows = [[SeriesFrac(e) for e in r] for r in matrix]
    out = []
    for vec in kernel_basis(rows, h.zero, h.one):
        den = NovikovSeries.one(field)
        for f in vec:
            if not f.is_zero():
                den = den * f.den
        cleared = []
        for f in vec:
            cleared.append(f.num * den.exact_div(f.den) if not f.is_zero() else NovikovSeries.zero(field))
        out.append(cleared)
    return out


# ---------------------------------------------------------------------------
# determinants and characteristic polynomials (exact series entries)
# ---------------------------------------------------------------------------

def series_det(matrix, field) -> NovikovSeries:
    """Bareiss fraction-free determinant of a matrix of exact series."""
    n = len(matrix)
    if n == 0:
        return NovikovSeries.one(field)
    m = [[e for e in row] for row in matrix]
    sign = 1
    prev = NovikovSeries.one(field)
    for k in range(n - 1):
        if not m[k][k].terms:
            swap = None
            for i in range(k + 1, n):
                if m[i][k].terms:
                    swap = i
                    break
            if swap is None:
                return NovikovSeries.zero(field)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
            m[i][k] = NovikovSeries.zero(field)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def series_charpoly(matrix, field):
    """Coefficients of det(x I - M), constant term first, as exact series.

    Uses the principal-minor expansion: the x^{n-k} coefficient is
    (-1)^k e_k(M) with e_k the sum of principal k x k minors.
    """
    from itertools import combinations

    n = len(matrix)
    coeffs = [NovikovSeries.zero(field) for _ in range(n + 1)]
    coeffs[n] = NovikovSeries.one(field)
    for k in range(1, n + 1):
        total = NovikovSeries.zero(field)
        for subset in combinations(range(n), k):
            sub = [[matrix[i][j] for j in subset] for i in subset]
            total = total + series_det(sub, field)
        if k % 2 == 1:
            total = -total
        coeffs[n - k] = total
    return coeffs


# ---------------------------------------------------------------------------
# invariant factors over the valuation ring (torsion exponents)
# ---------------------------------------------------------------------------

def lattice_invariants(matrix, field, initial_cap=None):
    """(rank, sorted torsion exponents) of a matrix of exact series.

    The matrix is viewed over the valuation ring (entries need valuation
    >= 0).  Substituting T = t^d (d the lcm of exponent denominators) makes
    every entry a polynomial in t; elimination then runs fully exactly in the
    localization of K[t] at (t) with RatFunc arithmetic — minimal-valuation
    pivoting is correct because the minimal entry divides all others.  The
    implementation is sparse (dict-of-dicts) since our matrices mostly are.
    """
    from .fields import RationalFunctionField

    if not matrix or not matrix[0]:
        return 0, []
    _ = initial_cap  # signature kept for compatibility; no caps needed
    d = 1
    for row in matrix:
        for e in row:
            if e.precision is not None:
                raise PrecisionInsufficient("lattice_invariants needs exact entries")
            k = e.exponent_denominator_lcm()
            d = d * k // _gcd_int(d, k)
    R = RationalFunctionField(field, "t")
    cols: dict = {}
    rows_of: dict = {}
    for i, row in enumerate(matrix):
        for j, e in enumerate(row):
            if e.terms:
                if e.terms[0][0] < 0:
                    raise ValueError("lattice_invariants: negative valuation entry")
                cols.setdefault(j, {})[i] = _series_to_ratfunc(e, d, R)
                rows_of.setdefault(i, set()).add(j)
    torsion = []
    while cols:
        # minimal t-order pivot; ties broken toward sparse rows/columns
        best = None
        for j, col in cols.items():
            for i, e in col.items():
                v = _t_order(e)
                fill = len(col) * len(rows_of[i])
                key = (v, fill, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        (v, _fill, _i, _j), pi, pj = best
        torsion.append(Fraction(v, d))
        pivot = cols[pj][pi]
        pivot_col = dict(cols[pj])
        pivot_row_cols = [j for j in rows_of[pi] if j != pj]
        # cache the pivot row entries before mutation
        pivot_row = {j: cols[j][pi] for j in pivot_row_cols}
        # remove pivot row and column
        for i in pivot_col:
            rows_of[i].discard(pj)
            if not rows_of[i]:
                del rows_of[i]
        del cols[pj]
        for j in pivot_row_cols:
            del cols[j][pi]
            if not cols[j]:
                del cols[j]
        if pi in rows_of:
            del rows_of[pi]
        # eliminate: for every other row i with entry in the pivot column,
        # row_i -= (e_i / pivot) * pivot_row
        for i, e_i in pivot_col.items():
            if i == pi:
                continue
            mult = e_i / pivot
            for j, e_pj in pivot_row.items():
                if j not in cols:
                    cols[j] = {}
                cur = cols[j].get(i)
                upd = (cur - mult * e_pj) if cur is not None else -(mult * e_pj)
                if upd.num:
                    cols[j][i] = upd
                    rows_of.setdefault(i, set()).add(j)
                else:
                    if cur is not None:
                        del cols[j][i]
                        rows_of[i].discard(j)
                        if not rows_of[i]:
                            del rows_of[i]
                    if not cols[j]:
                        del cols[j]
    rank = len(torsion)
    return rank, sorted(torsion)


def _series_to_ratfunc(e: NovikovSeries, d: int, R):
    deg = int(e.terms[-1][0] * d)
    coeffs = [R.base.zero] * (deg + 1)
    for g, c in e.terms:
        coeffs[int(g * d)] = c
    return _ratfunc_from_poly(coeffs, R)


def _ratfunc_from_poly(coeffs, R):
    from .fields import RatFunc

    return RatFunc(R, tuple(coeffs), (R.base.one,))


def _t_order(rf) -> int:
    for k, c in enumerate(rf.num):
        if c != rf.field.base.zero:
            return k
    raise ValueError("t-order of zero")


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# non-Archimedean Gram-Schmidt and level minimization
# ---------------------------------------------------------------------------

class Chain:
    """A vector with SeriesFrac coordinates and per-coordinate reference levels.

    level = max_i (action_i - v(coord_i)); the generator basis is orthogonal,
    so this is the honest filtration level of the chain.
    """

    __slots__ = ("coords", "actions", "field")

    def __init__(self, coords, actions, field):
        self.coords = [
            c if isinstance(c, SeriesFrac) else SeriesFrac(c) for c in coords
        ]
        self.actions = actions
        self.field = field

    def level(self):
        lv = -INF
        for a, c in zip(self.actions, self.coords):
            if not c.is_zero():
                lv = max(lv, a - c.valuation())
        return lv

    def is_zero(self):
        return all(c.is_zero() for c in self.coords)

    def residue(self, at_level):
        """Leading-coefficient vector of the level-``at_level`` part."""
        out = []
        for a, c in zip(self.actions, self.coords):
            if not c.is_zero() and a - c.valuation() == at_level:
                out.append(c.leading_coeff())
            else:
                out.append(self.field.zero)
        return out

    def axpy(self, coeff, shift, other: "Chain"):
        """self -= coeff * T^shift * other (coeff a field element)."""
        mono = SeriesFrac(NovikovSeries.monomial(self.field, shift, coeff))
        self.coords = [a - mono * b for a, b in zip(self.coords, other.coords)]


def orthogonalize(chains, drop_zero: bool = False):
    """Non-Archimedean Gram-Schmidt on a family of chains.

    Repeatedly replaces a residue-dependent member by the dependent
    combination, strictly lowering its level, until the residue vectors of
    the level-normalized family are independent.  Exact; terminates because
    levels drop on a discrete grid and are bounded below for an independent
    family.  With ``drop_zero`` a vector that collapses to exact zero (a
    dependent family member) is removed instead of raising.
    """
    if not chains:
        return []
    field = chains[0].field
    zero = field.zero
    work = list(chains)
    for _ in range(100000):
        residues = []
        for ch in work:
            residues.append(ch.residue(ch.level()))
        dep = _dependence(residues, zero, field.one)
        if dep is None:
            return work
        # replace the highest-index participating chain
        idx = max(i for i, a in enumerate(dep) if a != zero)
        target = work[idx]
        lv = target.level()
        inv = field.one / dep[idx]
        for i, a in enumerate(dep):
            if i == idx or a == zero:
                continue
            # scale work[i] to level lv: T^s with s = level(work[i]) - lv
            target.axpy(-(a * inv), work[i].level() - lv, work[i])
        # subtracting (leading parts cancel) strictly lowers target's level
        if target.is_zero():
            if drop_zero:
                work.pop(idx)
            else:
                raise ValueError("orthogonalize got a dependent family")
    raise PrecisionInsufficient("orthogonalization did not stabilize")


def _dependence(vectors, zero, one):
    """Nontrivial K-linear dependence among vectors, or None."""
    if not vectors:
        return None
    matrix = [[vectors[j][i] for j in range(len(vectors))] for i in range(len(vectors[0]))]
    ker = kernel_basis(matrix, zero, one)
    return ker[0] if ker else None


def reduce_level(chain: Chain, ortho):
    """min_{w in span(ortho)} level(chain - w), with the reducer applied.

    ``ortho`` must be orthogonal.  Returns the reduced chain; its level is
    the distance (−inf when the chain lies in the span).  The greedy step is
    optimal for an orthogonal family, so the result is exact and attained.
    """
    field = chain.field
    zero = field.zero
    for _ in range(100000):
        if chain.is_zero():
            return chain
        lv = chain.level()
        res = chain.residue(lv)
        basis_res = [b.residue(b.level()) for b in ortho]
        sol = solve_in_span(basis_res, res, zero)
        if sol is None:
            return chain
        for coeff, b in zip(sol, ortho):
            if coeff != zero:
                chain.axpy(coeff, b.level() - lv, b)
    raise PrecisionInsufficient("level reduction did not stabilize")
