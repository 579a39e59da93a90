"""Canonical JSON serialization for series, complexes, algebras and reports.

Everything the CLI reads or writes goes through here.  Reports are rendered
with sorted keys and fixed separators so identical inputs produce identical
bytes (determinism is part of the contract).  Numbers that must stay exact
travel as "a/b" strings.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import ParseError
from .fields import QQ, QI, GaussianRat, PrimeField, extend_field
from .filtered import FilteredComplex
from .semisimple import AlgebraOverNovikov
from .series import NovikovSeries

SCHEMA_VERSION = "1"


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def report(kind: str, body: dict) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "kind": kind}
    out.update(body)
    return out


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

def field_from_spec(spec) -> object:
    """{"kind": "Q"|"Qi"|"Fp"|"Fpk", ...} -> field handle."""
    if spec in (None, "Q"):
        return QQ
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec.get("kind")
    if kind == "Q":
        return QQ
    if kind == "Qi":
        return QI
    if kind == "Fp":
        return PrimeField(int(spec["p"]))
    if kind == "Fpk":
        return extend_field(int(spec["p"]), [int(c) for c in spec["modulus"]])
    raise ParseError(f"unknown field spec {spec!r}")


def coeff_to_json(c):
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, GaussianRat):
        return {"re": str(c.re), "im": str(c.im)}
    if hasattr(c, "val"):  # prime field element
        return c.val
    if hasattr(c, "coeffs"):  # extension element
        return {"coeffs": [coeff_to_json(x) for x in c.coeffs]}
    if hasattr(c, "num"):  # rational function
        return {
            "num": [coeff_to_json(x) for x in c.num],
            "den": [coeff_to_json(x) for x in c.den],
        }
    raise ParseError(f"cannot serialize coefficient {c!r}")


def coeff_from_json(doc, field):
    if field == QQ:
        return Fraction(str(doc))
    if field == QI:
        if isinstance(doc, dict):
            return GaussianRat(Fraction(doc["re"]), Fraction(doc["im"]))
        return GaussianRat(Fraction(str(doc)))
    if isinstance(field, PrimeField):
        return field.from_int(int(doc))
    if hasattr(field, "embed") and isinstance(doc, dict) and "coeffs" in doc:
        from .fields import ExtElem

        return ExtElem(field, tuple(coeff_from_json(x, field.base) for x in doc["coeffs"]))
    if hasattr(field, "embed"):
        return field.from_int(int(doc))
    raise ParseError(f"cannot parse coefficient {doc!r} for {field}")


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

def series_to_json(s: NovikovSeries) -> dict:
    return {
        "terms": [{"exp": str(g), "coeff": coeff_to_json(c)} for g, c in s.terms],
        "precision": None if s.precision is None else str(s.precision),
    }


def series_from_json(doc, field) -> NovikovSeries:
    try:
        terms = [
            (Fraction(t["exp"]), coeff_from_json(t["coeff"], field))
            for t in doc.get("terms", [])
        ]
        prec = doc.get("precision")
        return NovikovSeries(field, terms, None if prec is None else Fraction(prec))
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad series document: {e}") from None


def parse_series_text(text: str, field) -> NovikovSeries:
    """Tiny surface syntax for CLI cycles: 'c' or 'c*T^a/b [+ ...]'."""
    total = NovikovSeries.zero(field)
    for piece in text.replace("-", "+-").split("+"):
        piece = piece.strip()
        if not piece:
            continue
        neg = piece.startswith("-")
        if neg:
            piece = piece[1:].strip()
        if "T" in piece:
            coeff_part, _, exp_part = piece.partition("T")
            coeff_part = coeff_part.rstrip("*").strip() or "1"
            exp_part = exp_part.lstrip("^").strip() or "1"
        else:
            coeff_part, exp_part = piece, "0"
        try:
            coeff = field.from_int(1) * _scalar(coeff_part, field)
            exp = Fraction(exp_part)
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"bad series term {piece!r}: {e}") from None
        if neg:
            coeff = -coeff
        total = total + NovikovSeries.monomial(field, exp, coeff)
    return total


def _scalar(text: str, field):
    q = Fraction(text)
    out = field.zero
    one = field.one
    n = q.numerator
    step = one if n >= 0 else -one
    for _ in range(abs(n)):
        out = out + step
    den = field.from_int(q.denominator)
    return out / den


# ---------------------------------------------------------------------------
# filtered complexes
# ---------------------------------------------------------------------------

def complex_to_json(C: FilteredComplex) -> dict:
    return {
        "field": C.field.describe(),
        "mode": C.mode,
        "generators": [
            {"label": g.label, "degree": g.degree, "action": str(g.action)}
            for g in C.generators
        ],
        "differential": [
            {"from": src, "to": tgt, "series": series_to_json(series)}
            for src, row in sorted(C.diff.items())
            for tgt, series in sorted(row.items())
        ],
    }


def complex_from_json(doc) -> FilteredComplex:
    if not isinstance(doc, dict):
        raise ParseError("complex document must be an object")
    field = field_from_spec(doc.get("field", "Q"))
    try:
        gens = [
            (g["label"], int(g["degree"]), Fraction(str(g["action"])))
            for g in doc["generators"]
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad generator entry: {e}") from None
    diff: dict = {}
    for entry in doc.get("differential", []):
        try:
            src, tgt = entry["from"], entry["to"]
            series = series_from_json(entry["series"], field)
        except (KeyError, TypeError) as e:
            raise ParseError(f"bad differential entry: {e}") from None
        diff.setdefault(src, {})[tgt] = series
    mode = doc.get("mode", "strict")
    return FilteredComplex(field, gens, diff, mode)


def load_complex(path: str) -> FilteredComplex:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}") from None
    return complex_from_json(doc)


# ---------------------------------------------------------------------------
# algebras
# ---------------------------------------------------------------------------

def algebra_to_json(A: AlgebraOverNovikov) -> dict:
    return {
        "field": A.field.describe(),
        "basis": list(A.basis),
        "unit": [series_to_json(s) for s in A.unit],
        "table": [
            [[series_to_json(s) for s in cell] for cell in row] for row in A.table
        ],
        "element": [
            series_to_json(s) for s in A.meta.get("element_coords", [])
        ],
    }


def algebra_from_json(doc) -> AlgebraOverNovikov:
    if not isinstance(doc, dict):
        raise ParseError("algebra document must be an object")
    field = field_from_spec(doc.get("field", "Q"))
    try:
        basis = list(doc["basis"])
        unit = [series_from_json(s, field) for s in doc["unit"]]
        table = [
            [[series_from_json(s, field) for s in cell] for cell in row]
            for row in doc["table"]
        ]
    except (KeyError, TypeError) as e:
        raise ParseError(f"bad algebra document: {e}") from None
    A = AlgebraOverNovikov(field, basis, table, unit)
    if doc.get("element"):
        A.meta["element_coords"] = [series_from_json(s, field) for s in doc["element"]]
    return A


def load_algebra(path: str) -> AlgebraOverNovikov:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}") from None
    return algebra_from_json(doc)


def load_polytope(path: str):
    from .polytope import parse_polytope

    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from None
    return parse_polytope(text)
