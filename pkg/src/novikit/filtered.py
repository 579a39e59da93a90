"""Filtered chain complexes over a Novikov field: barcodes and invariants.

A complex is a finite set of Z_2-graded generators with rational actions and
a square-zero differential with Novikov-series entries.  The differential
must decrease the filtration level entrywise: strictly in ``strict`` mode,
weakly in ``verbose`` mode (where zero-length bars may occur).

The barcode is computed on the action-normalized matrix (entry d_{qp} shifted
by T^{l(p)-l(q)}), whose invariant factors over the valuation ring are the
finite bar lengths; infinite bars count the homology rank over the field.
Spectral invariants, boundary depth and persistence ranks all reduce to exact
level-minimizing reductions against orthogonalized bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import ComplexViolation, NotClosed, ParseError
from .linalg import (
    Chain,
    lattice_invariants,
    orthogonalize,
    reduce_level,
    series_kernel,
    series_matrix_rank,
)
from .series import INF, NovikovSeries


@dataclass(frozen=True)
class Generator:
    label: str
    degree: int  # in Z/2
    action: Fraction


@dataclass(frozen=True)
class Barcode:
    """Reduced barcode: finite bar lengths (a multiset) + infinite bar count."""

    finite_bars: tuple  # sorted Fractions, zero-length allowed in verbose mode
    infinite_bars: int
    generators: int

    def endpoint_identity(self) -> bool:
        return 2 * len(self.finite_bars) + self.infinite_bars == self.generators

    def total_length(self) -> Fraction:
        return sum(self.finite_bars, Fraction(0))

    def longest_finite(self) -> Fraction:
        return max(self.finite_bars, default=Fraction(0))

    def describe(self):
        return {
            "finite_bars": [str(b) for b in self.finite_bars],
            "infinite_bars": self.infinite_bars,
        }


class FilteredComplex:
    """Generators + differential + mode; validated exactly on demand."""

    def __init__(self, field, generators, differential, mode: str = "strict"):
        if mode not in ("strict", "verbose"):
            raise ParseError(f"mode must be strict or verbose, not {mode!r}")
        self.field = field
        self.generators = [
            g if isinstance(g, Generator) else Generator(g[0], int(g[1]) % 2, Fraction(g[2]))
            for g in generators
        ]
        labels = [g.label for g in self.generators]
        if len(set(labels)) != len(labels):
            raise ParseError("duplicate generator labels")
        self.index = {g.label: i for i, g in enumerate(self.generators)}
        self.mode = mode
        self.diff: dict = {}
        for src, row in differential.items():
            if src not in self.index:
                raise ParseError(f"differential source {src!r} is not a generator")
            clean = {}
            for tgt, series in row.items():
                if tgt not in self.index:
                    raise ParseError(f"differential target {tgt!r} is not a generator")
                if series.terms:
                    clean[tgt] = series
            if clean:
                self.diff[src] = clean

    # -- structure -------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.generators)

    def action(self, label: str) -> Fraction:
        return self.generators[self.index[label]].action

    def degree(self, label: str) -> int:
        return self.generators[self.index[label]].degree

    def entry(self, tgt: str, src: str) -> NovikovSeries:
        return self.diff.get(src, {}).get(tgt, NovikovSeries.zero(self.field))

    def matrix(self):
        """Dense differential, rows = targets, columns = sources."""
        z = NovikovSeries.zero(self.field)
        m = [[z] * self.n for _ in range(self.n)]
        for src, row in self.diff.items():
            j = self.index[src]
            for tgt, series in row.items():
                m[self.index[tgt]][j] = series
        return m

    def normalized_matrix(self):
        """Entry (q,p) shifted by T^{l(p)-l(q)}: valuations = level drops."""
        m = self.matrix()
        for i, gq in enumerate(self.generators):
            for j, gp in enumerate(self.generators):
                e = m[i][j]
                if e.terms:
                    m[i][j] = e.shift(gp.action - gq.action)
        return m

    def validate(self):
        """Check d^2 = 0 exactly, the grading shift, and action decrease."""
        for src, row in self.diff.items():
            dp = self.degree(src)
            lp = self.action(src)
            for tgt, series in row.items():
                if self.degree(tgt) != (dp - 1) % 2:
                    raise ComplexViolation(
                        f"grading: d({src}) hits {tgt} of degree {self.degree(tgt)}"
                    )
                level = self.action(tgt) - series.valuation()
                if self.mode == "strict" and not level < lp:
                    raise ComplexViolation(
                        f"action: entry {tgt}<-{src} has level {level} >= {lp}"
                    )
                if self.mode == "verbose" and not level <= lp:
                    raise ComplexViolation(
                        f"action: entry {tgt}<-{src} has level {level} > {lp}"
                    )
        m = self.matrix()
        for j in range(self.n):
            for i in range(self.n):
                acc = NovikovSeries.zero(self.field)
                for k in range(self.n):
                    if m[i][k].terms and m[k][j].terms:
                        acc = acc + m[i][k] * m[k][j]
                if acc.terms:
                    raise ComplexViolation(
                        f"d^2 != 0 at ({self.generators[i].label}, {self.generators[j].label})"
                    )
        return True

    # -- barcode and friends -----------------------------------------------------

    def barcode(self) -> Barcode:
        rank, torsion = lattice_invariants(self.normalized_matrix(), self.field)
        return Barcode(
            finite_bars=tuple(sorted(torsion)),
            infinite_bars=self.n - 2 * rank,
            generators=self.n,
        )

    def boundary_depth(self) -> Fraction:
        return self.barcode().longest_finite()

    def total_bar_length(self) -> Fraction:
        return self.barcode().total_length()

    def rank(self) -> int:
        return series_matrix_rank(self.matrix(), self.field)

    # -- chains ------------------------------------------------------------------

    def chain(self, coeffs: dict) -> list:
        """Coefficient vector from {label: NovikovSeries}."""
        vec = [NovikovSeries.zero(self.field) for _ in range(self.n)]
        for label, c in coeffs.items():
            vec[self.index[label]] = c
        return vec

    def apply_diff(self, vec):
        m = self.matrix()
        out = []
        for i in range(self.n):
            acc = NovikovSeries.zero(self.field)
            for j in range(self.n):
                if m[i][j].terms and vec[j].terms:
                    acc = acc + m[i][j] * vec[j]
            out.append(acc)
        return out

    def level(self, vec) -> Fraction:
        lv = -INF
        for g, c in zip(self.generators, vec):
            if c.terms:
                lv = max(lv, g.action - c.valuation())
        return lv

    def _actions(self):
        return [g.action for g in self.generators]

    def _image_chains(self):
        """Independent differential columns as Chains (then orthogonalized)."""
        m = self.matrix()
        cols = []
        for j in range(self.n):
            col = [m[i][j] for i in range(self.n)]
            if any(c.terms for c in col):
                cols.append(col)
        # select an independent subset by incremental rank
        chosen: list = []
        r = 0
        for col in cols:
            candidate = chosen + [col]
            rk = series_matrix_rank(
                [[candidate[k][i] for k in range(len(candidate))] for i in range(self.n)],
                self.field,
            )
            if rk > r:
                chosen.append(col)
                r = rk
        actions = self._actions()
        return orthogonalize([Chain(c, actions, self.field) for c in chosen])

    def spectral_invariant(self, coeffs: dict):
        """(level, is_zero_class): min level over homologous representatives.

        The chain must be exactly closed (NotClosed otherwise).  The zero
        class reports level -inf with the flag set, by convention.
        """
        vec = self.chain(coeffs)
        if any(c.terms for c in self.apply_diff(vec)):
            raise NotClosed("the chain is not a cycle")
        ortho = self._image_chains()
        reduced = reduce_level(Chain(vec, self._actions(), self.field), ortho)
        if reduced.is_zero():
            return -INF, True
        return reduced.level(), False

    def infinite_bar_births(self):
        """Canonical birth levels of the infinite bars (sorted)."""
        m = self.matrix()
        ortho_im = self._image_chains()
        kernel = series_kernel(m, self.field)
        actions = self._actions()
        survivors = []
        for k in kernel:
            red = reduce_level(Chain(list(k), actions, self.field), list(ortho_im))
            if not red.is_zero():
                survivors.append(red)
        full = orthogonalize(list(ortho_im) + survivors, drop_zero=True)
        births = sorted(ch.level() for ch in full[len(ortho_im):])
        return births

    def persistence_rank(self, s) -> int:
        """rank(HF^{<=s} -> HF): infinite bars born at or below s."""
        s = Fraction(s)
        return sum(1 for b in self.infinite_bar_births() if b <= s)

    def boundary_depth_direct(self) -> Fraction:
        """The infimum definition, via level-minimized preimages.

        For an orthogonal image basis the depth is the largest gap between
        an image vector's level and the minimal level of its preimages; see
        ledger for the equivalence argument.  Exact; intended as an oracle
        for small complexes.
        """
        ortho = self._image_chains()
        if not ortho:
            return Fraction(0)
        m = self.matrix()
        kernel = series_kernel(m, self.field)
        actions = self._actions()
        ortho_ker = orthogonalize(
            [Chain(list(k), actions, self.field) for k in kernel]
        ) if kernel else []
        best = Fraction(0)
        from .linalg import series_solve

        for ch in ortho:
            # GS corrections only used monomial multipliers, so the coords'
            # denominators are monomials and expand exactly
            target = []
            for c in ch.coords:
                if c.is_zero():
                    target.append(NovikovSeries.zero(self.field))
                else:
                    assert len(c.den.terms) == 1 and c.den.precision is None
                    target.append(c.expand(Fraction(0)))
            sol = series_solve(m, target, self.field)
            assert sol is not None, "image chain must have a preimage"
            pre = Chain(sol, actions, self.field)
            pre = reduce_level(pre, ortho_ker)
            gap = pre.level() - ch.level()
            best = max(best, gap)
        return best

    def dual(self) -> "FilteredComplex":
        """Reverse all actions and transpose the differential (the op model)."""
        gens = [Generator(g.label, (g.degree + 1) % 2, -g.action) for g in self.generators]
        diff: dict = {}
        for src, row in self.diff.items():
            for tgt, series in row.items():
                diff.setdefault(tgt, {})[src] = series
        return FilteredComplex(self.field, gens, diff, self.mode)

    def describe(self):
        return {
            "mode": self.mode,
            "generators": [
                {"label": g.label, "degree": g.degree, "action": str(g.action)}
                for g in self.generators
            ],
            "differential": [
                {"from": src, "to": tgt}
                for src, row in sorted(self.diff.items())
                for tgt in sorted(row)
            ],
        }


# ---------------------------------------------------------------------------
# module-level operation spellings
# ---------------------------------------------------------------------------

def validate(C: FilteredComplex):
    return C.validate()


def barcode(C: FilteredComplex) -> Barcode:
    return C.barcode()


def boundary_depth(C: FilteredComplex) -> Fraction:
    return C.boundary_depth()


def total_bar_length(C: FilteredComplex) -> Fraction:
    return C.total_bar_length()


def spectral_invariant(C: FilteredComplex, coeffs: dict):
    return C.spectral_invariant(coeffs)


def persistence_rank(C: FilteredComplex, s) -> int:
    return C.persistence_rank(s)


# ---------------------------------------------------------------------------
# bottleneck distance
# ---------------------------------------------------------------------------

def bottleneck_distance(B1: Barcode, B2: Barcode):
    """Reduced bottleneck distance: delete bars of length <= 2*delta, match
    the rest within delta.  +inf iff the infinite-bar counts differ.

    Feasibility at each candidate delta is decided by exhaustive augmenting-
    path matching (exact; desk-scale bar counts).
    """
    if B1.infinite_bars != B2.infinite_bars:
        return INF
    xs, ys = list(B1.finite_bars), list(B2.finite_bars)
    if not xs and not ys:
        return Fraction(0)
    cands = {Fraction(0)}
    for x in xs:
        cands.add(x / 2)
        for y in ys:
            cands.add(abs(x - y))
    for y in ys:
        cands.add(y / 2)
    for delta in sorted(cands):
        if _matchable(xs, ys, delta):
            return delta
    raise AssertionError("bottleneck search must terminate at max candidate")


def _matchable(xs, ys, delta) -> bool:
    must_x = [i for i, x in enumerate(xs) if x > 2 * delta]
    must_y = [j for j, y in enumerate(ys) if y > 2 * delta]
    # Hall-style augmenting matching covering both must-sets simultaneously:
    # match every must_x to a distinct y within delta (preferring must_y is
    # not required: any y works), then ensure leftover must_y are matched to
    # distinct free xs within delta.
    edges_x = {
        i: [j for j, y in enumerate(ys) if abs(xs[i] - y) <= delta] for i in must_x
    }
    match_y: dict = {}

    def try_x(i, seen):
        for j in edges_x[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_y or try_x(match_y[j], seen):
                match_y[j] = i
                return True
        return False

    for i in must_x:
        if not try_x(i, set()):
            return False
    # now cover must_y not already matched, using xs not already used
    used_x = set(match_y.values())
    free_y = [j for j in must_y if j not in match_y]
    edges_y = {
        j: [i for i, x in enumerate(xs) if i not in used_x and abs(x - ys[j]) <= delta]
        for j in free_y
    }
    match_x: dict = {}

    def try_y(j, seen):
        for i in edges_y[j]:
            if i in seen:
                continue
            seen.add(i)
            if i not in match_x or try_y(match_x[i], seen):
                match_x[i] = j
                return True
        return False

    for j in free_y:
        if not try_y(j, set()):
            return False
    return True


# ---------------------------------------------------------------------------
# quasiequivalence verification
# ---------------------------------------------------------------------------

def _as_matrix(mapping, src: FilteredComplex, tgt: FilteredComplex):
    z = NovikovSeries.zero(src.field)
    m = [[z] * src.n for _ in range(tgt.n)]
    for s_label, row in mapping.items():
        j = src.index[s_label]
        for t_label, series in row.items():
            m[tgt.index[t_label]][j] = series
    return m


def _mat_mul(A, B, field):
    rows, mid, cols = len(A), len(B), len(B[0]) if B else 0
    z = NovikovSeries.zero(field)
    out = [[z] * cols for _ in range(rows)]
    for i in range(rows):
        for k in range(mid):
            if not A[i][k].terms:
                continue
            for j in range(cols):
                if B[k][j].terms:
                    out[i][j] = out[i][j] + A[i][k] * B[k][j]
    return out


def _mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_zero(A) -> bool:
    return all(not e.terms for row in A for e in row)


def _shift_ok(m, src: FilteredComplex, tgt: FilteredComplex, bound) -> bool:
    for j, gp in enumerate(src.generators):
        for i, gq in enumerate(tgt.generators):
            e = m[i][j]
            if e.terms and gq.action - e.valuation() > gp.action + bound:
                return False
    return True


def check_quasiequivalence(C1, C2, Phi, Psi, K1, K2, delta):
    """Verify the four conditions of a delta-quasiequivalence exactly.

    Maps are {source label: {target label: series}}.  Returns (ok, report):
    on failure the report names the first violated condition.
    """
    delta = Fraction(delta)
    phi = _as_matrix(Phi, C1, C2)
    psi = _as_matrix(Psi, C2, C1)
    k1 = _as_matrix(K1, C1, C1)
    k2 = _as_matrix(K2, C2, C2)
    d1 = C1.matrix()
    d2 = C2.matrix()
    f = C1.field
    if not _mat_zero(_mat_sub(_mat_mul(phi, d1, f), _mat_mul(d2, phi, f))):
        return False, "Phi is not a chain map"
    if not _mat_zero(_mat_sub(_mat_mul(psi, d2, f), _mat_mul(d1, psi, f))):
        return False, "Psi is not a chain map"
    ident1 = [[NovikovSeries.one(f) if i == j else NovikovSeries.zero(f) for j in range(C1.n)] for i in range(C1.n)]
    ident2 = [[NovikovSeries.one(f) if i == j else NovikovSeries.zero(f) for j in range(C2.n)] for i in range(C2.n)]
    homotopy1 = _mat_sub(
        _mat_sub(_mat_mul(psi, phi, f), ident1),
        _mat_sub(_mat_mul(d1, k1, f), [[-x for x in row] for row in _mat_mul(k1, d1, f)]),
    )
    if not _mat_zero(homotopy1):
        return False, "Psi Phi - id != d K1 + K1 d"
    homotopy2 = _mat_sub(
        _mat_sub(_mat_mul(phi, psi, f), ident2),
        _mat_sub(_mat_mul(d2, k2, f), [[-x for x in row] for row in _mat_mul(k2, d2, f)]),
    )
    if not _mat_zero(homotopy2):
        return False, "Phi Psi - id != d K2 + K2 d"
    if not _shift_ok(phi, C1, C2, delta):
        return False, "Phi raises levels by more than delta"
    if not _shift_ok(psi, C2, C1, delta):
        return False, "Psi raises levels by more than delta"
    if not _shift_ok(k1, C1, C1, 2 * delta):
        return False, "K1 raises levels by more than 2*delta"
    if not _shift_ok(k2, C2, C2, 2 * delta):
        return False, "K2 raises levels by more than 2*delta"
    return True, "ok"
