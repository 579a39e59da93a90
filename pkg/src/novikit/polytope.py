"""Moment polytopes {u : <u, v_j> >= lambda_j} with exact rational data.

Validation is fully exact: boundedness by recession-cone analysis (the cone
{A u >= 0} is trivial iff A has full column rank and no extreme ray, and
extreme rays of a pointed cone live on (n-1)-subsets of the normals), and
full-dimensionality by the affine rank of the exactly enumerated vertex set.
Vertices are found by brute force over n-subsets of facets — exactness over
speed, N <= 12 at desk scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import NotFullDimensional, ParseError, Unbounded


@dataclass(frozen=True)
class Polytope:
    """Facet presentation: dimension n and a list of (normal, offset) pairs."""

    n: int
    facets: tuple  # of (tuple[int,...], Fraction)
    name: str = ""

    @property
    def N(self) -> int:
        return len(self.facets)

    def normals(self):
        return [v for v, _ in self.facets]

    def offsets(self):
        return [lam for _, lam in self.facets]

    def support_values(self, u):
        """The exact values l_j(u) = <u, v_j> - lambda_j."""
        u = [Fraction(x) for x in u]
        out = []
        for v, lam in self.facets:
            out.append(sum((Fraction(a) * b for a, b in zip(v, u)), Fraction(0)) - lam)
        return out

    def is_interior(self, u) -> bool:
        return all(val > 0 for val in self.support_values(u))

    def vertices(self):
        """All vertices, exactly, via n-subsets of facets."""
        verts = []
        seen = set()
        for idx in combinations(range(self.N), self.n):
            rows = [list(self.facets[i][0]) for i in idx]
            rhs = [self.facets[i][1] for i in idx]
            pt = _solve_rational(rows, rhs)
            if pt is None:
                continue
            key = tuple(pt)
            if key in seen:
                continue
            if all(val >= 0 for val in self.support_values(pt)):
                seen.add(key)
                verts.append(pt)
        return sorted(verts)

    def vertex_count(self) -> int:
        return len(self.vertices())

    def delzant_check(self):
        """(ok, violations): at every vertex the active normals are a Z-basis."""
        violations = []
        for v in self.vertices():
            active = [
                self.facets[j][0]
                for j, val in enumerate(self.support_values(v))
                if val == 0
            ]
            if len(active) != self.n:
                violations.append((tuple(v), "not simple"))
                continue
            det = _int_det([list(a) for a in active])
            if det not in (1, -1):
                violations.append((tuple(v), f"det {det}"))
        return (not violations), violations

    def kouchnirenko_bound(self) -> int:
        """n! times the volume of the Newton polytope conv{v_j}."""
        return lattice_normalized_volume([list(v) for v, _ in self.facets], self.n)

    def translate(self, t):
        """Shift lambda_j -> lambda_j + <t, v_j> (moves the polytope by t)."""
        t = [Fraction(x) for x in t]
        facets = tuple(
            (v, lam + sum((Fraction(a) * b for a, b in zip(v, t)), Fraction(0)))
            for v, lam in self.facets
        )
        return Polytope(self.n, facets, self.name)

    def describe(self):
        return {
            "dim": self.n,
            "name": self.name,
            "facets": [
                {"v": list(v), "lambda": str(lam)} for v, lam in self.facets
            ],
        }


# ---------------------------------------------------------------------------
# exact rational linear algebra helpers
# ---------------------------------------------------------------------------

def _solve_rational(rows, rhs):
    """Unique solution of a square rational system, or None if singular."""
    n = len(rows)
    m = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
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


def _int_det(rows) -> int:
    n = len(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = m[col][col]
        m[col] = [x / inv for x in m[col]]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    assert det.denominator == 1
    return int(det)


def _rational_rank(rows) -> int:
    if not rows:
        return 0
    m = [[Fraction(x) for x in row] for row in rows]
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = m[rank][col]
        m[rank] = [x / inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def _kernel_vector(rows, n):
    """A nonzero rational kernel vector of the (possibly empty) row set."""
    if not rows:
        vec = [Fraction(0)] * n
        vec[0] = Fraction(1)
        return vec
    m = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    rank = 0
    for col in range(n):
        piv = None
        for r in range(rank, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = m[rank][col]
        m[rank] = [x / inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [Fraction(0)] * n
    vec[fc] = Fraction(1)
    for r, pc in enumerate(pivots):
        vec[pc] = -m[r][fc]
    return vec


def _has_recession_ray(normals, n) -> bool:
    """True iff {u != 0 : <u, v_j> >= 0 for all j} is nonempty."""
    if _rational_rank([list(v) for v in normals]) < n:
        return True  # a full line in the kernel
    def ok(u):
        return all(
            sum(Fraction(a) * b for a, b in zip(v, u)) >= 0 for v in normals
        )
    if n == 1:
        return ok([Fraction(1)]) or ok([Fraction(-1)])
    for idx in combinations(range(len(normals)), n - 1):
        sub = [list(normals[i]) for i in idx]
        if _rational_rank(sub) != n - 1:
            continue
        u = _kernel_vector(sub, n)
        if u is None:
            continue
        if ok(u) or ok([-x for x in u]):
            return True
    return False


# ---------------------------------------------------------------------------
# parsing and validation
# ---------------------------------------------------------------------------

def parse_polytope(text: str) -> Polytope:
    """Parse and validate a polytope document (JSON; see README for schema)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"polytope file is not valid JSON: {e}") from None
    return polytope_from_dict(doc)


def polytope_from_dict(doc) -> Polytope:
    if not isinstance(doc, dict):
        raise ParseError("polytope document must be an object")
    try:
        n = int(doc["dim"])
        raw = doc["facets"]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"missing/invalid field: {e}") from None
    if n < 1:
        raise ParseError("dim must be >= 1")
    facets = []
    for item in raw:
        try:
            v = tuple(int(x) for x in item["v"])
            lam = Fraction(str(item["lambda"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"bad facet entry {item}: {e}") from None
        if len(v) != n:
            raise ParseError(f"normal {v} has wrong dimension (expected {n})")
        facets.append((v, lam))
    if len(facets) < n + 1:
        raise ParseError(f"need at least {n + 1} facets for a bounded polytope")
    P = Polytope(n, tuple(facets), str(doc.get("name", "")))
    validate_polytope(P)
    return P


def validate_polytope(P: Polytope):
    if _has_recession_ray(P.normals(), P.n):
        raise Unbounded("the polytope has a recession direction")
    verts = P.vertices()
    if not verts:
        raise NotFullDimensional("no vertices found (empty feasible set?)")
    diffs = [[b - a for a, b in zip(verts[0], v)] for v in verts[1:]]
    if _rational_rank(diffs) < P.n:
        raise NotFullDimensional(
            f"vertex set has affine rank {_rational_rank(diffs)} < {P.n}"
        )
    return True


# ---------------------------------------------------------------------------
# normalized volume of the Newton polytope
# ---------------------------------------------------------------------------

def lattice_normalized_volume(points, n) -> int:
    """n! * vol(conv(points)) for integer points; 0 when degenerate."""
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if len(pts) <= n:
        return 0
    if n == 1:
        return max(p[0] for p in pts) - min(p[0] for p in pts)
    if n == 2:
        hull = _convex_hull_2d(pts)
        if len(hull) < 3:
            return 0
        twice = 0
        for i in range(len(hull)):
            x1, y1 = hull[i]
            x2, y2 = hull[(i + 1) % len(hull)]
            twice += x1 * y2 - x2 * y1
        return abs(twice)
    if n == 3:
        return _normalized_volume_3d(pts)
    raise NotImplementedError(f"volume in dimension {n} is beyond desk scale")


def _convex_hull_2d(pts):
    """Andrew monotone chain; returns CCW hull vertices."""
    pts = sorted(pts)
    if len(pts) <= 2:
        return list(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _normalized_volume_3d(pts) -> int:
    """6 * vol(conv(pts)) via supporting planes and the divergence formula.

    For each supporting plane (outward normal a, offset b with <a,x> <= b on
    the hull) the flux contribution is b * (2*Area of the projected facet
    polygon) / |a_k|, with k the dropped coordinate; summing and dividing by
    3!'s partner 2... the total below is exactly 6*vol, an integer.
    """
    planes = {}
    for tri in combinations(range(len(pts)), 3):
        p1, p2, p3 = (pts[i] for i in tri)
        u = [p2[i] - p1[i] for i in range(3)]
        w = [p3[i] - p1[i] for i in range(3)]
        a = (
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        )
        if a == (0, 0, 0):
            continue
        b = sum(ai * xi for ai, xi in zip(a, p1))
        vals = [sum(ai * xi for ai, xi in zip(a, p)) for p in pts]
        if all(v <= b for v in vals):
            key = _normalize_plane(a, b)
            planes[key] = True
        if all(v >= b for v in vals):
            key = _normalize_plane(tuple(-x for x in a), -b)
            planes[key] = True
    total = Fraction(0)
    for a, b in planes:
        on = [p for p in pts if sum(ai * xi for ai, xi in zip(a, p)) == b]
        k = max(range(3), key=lambda i: abs(a[i]))
        proj = [tuple(p[i] for i in range(3) if i != k) for p in on]
        hull = _convex_hull_2d(sorted(set(proj)))
        if len(hull) < 3:
            continue
        twice = 0
        for i in range(len(hull)):
            x1, y1 = hull[i]
            x2, y2 = hull[(i + 1) % len(hull)]
            twice += x1 * y2 - x2 * y1
        total += Fraction(b * abs(twice), abs(a[k]))
    assert total.denominator == 1, "3d volume accumulation must be integral"
    return int(total)


def _normalize_plane(a, b):
    from math import gcd

    g = 0
    for x in a:
        g = gcd(g, abs(x))
    g = gcd(g, abs(b)) if b else g
    if g > 1:
        a = tuple(x // g for x in a)
        b = b // g
    return (a, b)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def preset(name: str) -> Polytope:
    """Built-in moment polytopes: cp1, cp2, f2, f4 (and cpN helpers)."""
    name = name.lower()
    if name == "cp1":
        return projective_space(1)
    if name == "cp2":
        return projective_space(2)
    if name == "cp3":
        return projective_space(3)
    if name == "f2":
        return hirzebruch(2, Fraction(1, 2))
    if name == "f4":
        return hirzebruch(4, Fraction(1, 2))
    raise ParseError(f"unknown preset {name!r} (have cp1, cp2, f2, f4)")


PRESET_NAMES = ("cp1", "cp2", "f2", "f4")


def projective_space(n: int) -> Polytope:
    """Standard simplex presentation of complex projective n-space."""
    facets = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        facets.append((e, Fraction(0)))
    facets.append((tuple(-1 for _ in range(n)), Fraction(-1)))
    return Polytope(n, tuple(facets), f"cp{n}")


def hirzebruch(n: int, alpha: Fraction) -> Polytope:
    """The n-th Hirzebruch surface with shape parameter alpha in (0,1)."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ParseError("hirzebruch parameter must be in (0,1)")
    facets = (
        ((1, 0), Fraction(0)),
        ((0, 1), Fraction(0)),
        ((0, -1), alpha - 1),
        ((-1, -n), Fraction(-n)),
    )
    return Polytope(2, facets, f"f{n}")
