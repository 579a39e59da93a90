"""Command-line front end.

Subcommands: potential analyze, bulk search, algebra split, filtered
barcode|depth|tau|rho|bottleneck, tate check, pipeline, presets, selftest,
version.  All output is canonical JSON with a schema_version field; reports
are byte-identical across runs for a fixed seed.  Exit codes: 0 ok, 2 parse
error, 3 precision failure, 4 budget exhausted, 1 anything else.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .errors import (
    BoundaryCase,
    ComplexViolation,
    FieldBudgetExceeded,
    IndeterminateValuation,
    NotClosed,
    NotFullDimensional,
    NotInterior,
    NovikitError,
    ParseError,
    PrecisionInsufficient,
    PrimeTooSmall,
    SearchExhausted,
    Unbounded,
    WindowTooSmall,
)
from .fields import QQ, is_prime
from .filtered import bottleneck_distance
from .formats import (
    canonical_json,
    complex_to_json,
    load_algebra,
    load_complex,
    load_polytope,
    parse_series_text,
    report,
    series_to_json,
)
from .polytope import PRESET_NAMES, Polytope, preset
from .potential import (
    BulkDeformation,
    build_fiber_potential,
    build_ghv,
    certify_convenient,
    classify_inside,
    hessian_certificate,
    search_convenient_bulk,
    solve_critical_points,
)
from .semisimple import certify_semisimple, diagonal_algebra, mod_p_transfer
from .series import NovikovSeries
from .tate import quasi_frobenius_check

PARSE_ERRORS = (
    ParseError,
    Unbounded,
    NotFullDimensional,
    NotInterior,
    ComplexViolation,
    NotClosed,
    BoundaryCase,
)
PRECISION_ERRORS = (PrecisionInsufficient, IndeterminateValuation, WindowTooSmall)
BUDGET_ERRORS = (FieldBudgetExceeded, SearchExhausted)

DEFAULT_PRIMES = (5, 7, 11, 13)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        doc = args.func(args)
    except PARSE_ERRORS as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except PRECISION_ERRORS as e:
        sys.stderr.write(f"precision: {e}\n")
        return 3
    except BUDGET_ERRORS as e:
        sys.stderr.write(f"budget: {e}\n")
        return 4
    except NovikitError as e:
        sys.stderr.write(f"failed: {e}\n")
        return 1
    if doc is not None:
        out = canonical_json(doc)
        if getattr(args, "output", None):
            with open(args.output, "w") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    return getattr(args, "exit_code", 0)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="novikit", description=__doc__)
    sub = p.add_subparsers()

    pot = sub.add_parser("potential", help="superpotential analysis")
    pot_sub = pot.add_subparsers()
    ana = pot_sub.add_parser("analyze", help="critical points and certificates")
    _polytope_args(ana)
    ana.add_argument("--bulk", help='weights "c1,...,cN" (Gaussian integers)')
    ana.add_argument("--precision", default="5", help="T-adic precision a/b")
    ana.add_argument("--fiber", help='interior point "u1,...,un"')
    ana.add_argument("--field-budget", type=int, default=8)
    ana.add_argument("--output")
    ana.set_defaults(func=cmd_potential_analyze)

    blk = sub.add_parser("bulk", help="bulk deformation search")
    blk_sub = blk.add_subparsers()
    bse = blk_sub.add_parser("search", help="find a convenient bulk")
    _polytope_args(bse)
    bse.add_argument("--norm-bound", type=int, default=3)
    bse.add_argument("--trials", type=int, default=64)
    bse.add_argument("--seed", type=int, default=0)
    bse.add_argument("--precision", default="5")
    bse.add_argument("--output")
    bse.set_defaults(func=cmd_bulk_search)

    alg = sub.add_parser("algebra", help="semisimple algebra operations")
    alg_sub = alg.add_subparsers()
    spl = alg_sub.add_parser("split", help="idempotent splitting")
    spl.add_argument("--file", help="algebra JSON file")
    spl.add_argument("--from-potential", help="preset or polytope file")
    spl.add_argument("--element", help="basis label or comma coordinates")
    spl.add_argument("--precision", default="8")
    spl.add_argument("--mod-p", type=int, help="also transfer to this prime")
    spl.add_argument("--seed", type=int, default=0)
    spl.add_argument("--output")
    spl.set_defaults(func=cmd_algebra_split)

    flt = sub.add_parser("filtered", help="filtered complex invariants")
    flt_sub = flt.add_subparsers()
    for name, fn in (
        ("barcode", cmd_filtered_barcode),
        ("depth", cmd_filtered_depth),
        ("tau", cmd_filtered_tau),
        ("rho", cmd_filtered_rho),
        ("bottleneck", cmd_filtered_bottleneck),
    ):
        c = flt_sub.add_parser(name)
        c.add_argument("--complex", required=True)
        if name == "bottleneck":
            c.add_argument("--complex2", required=True)
        if name == "rho":
            c.add_argument("--cycle", required=True,
                           help='chain like "x" or "x+2*T^1/2*y" (labels as terms)')
        c.add_argument("--output")
        c.set_defaults(func=fn)

    tat = sub.add_parser("tate", help="Z/p Tate construction")
    tat_sub = tat.add_subparsers()
    chk = tat_sub.add_parser("check")
    chk.add_argument("--complex", required=True)
    chk.add_argument("--p", type=int, required=True)
    chk.add_argument("--window", type=int, default=4)
    chk.add_argument("--output")
    chk.set_defaults(func=cmd_tate_check)

    pipe = sub.add_parser("pipeline", help="end-to-end analysis of a polytope")
    _polytope_args(pipe)
    pipe.add_argument("--seed", type=int, default=0)
    pipe.add_argument("--precision", default="5")
    pipe.add_argument("--transfer-precision", default="8")
    pipe.add_argument("--primes", default=",".join(str(q) for q in DEFAULT_PRIMES))
    pipe.add_argument("--trials", type=int, default=64)
    pipe.add_argument("--norm-bound", type=int, default=3)
    pipe.add_argument("--output")
    pipe.set_defaults(func=cmd_pipeline)

    pre = sub.add_parser("presets", help="list built-in polytopes")
    pre.set_defaults(func=cmd_presets)

    ver = sub.add_parser("version")
    ver.set_defaults(func=cmd_version)

    st = sub.add_parser("selftest", help="run the built-in example suite")
    st.set_defaults(func=cmd_selftest)
    return p


def _polytope_args(c):
    c.add_argument("--polytope", help="polytope JSON file")
    c.add_argument("--preset", choices=PRESET_NAMES, help="built-in polytope")


def _get_polytope(args) -> Polytope:
    if getattr(args, "preset", None):
        return preset(args.preset)
    if getattr(args, "polytope", None):
        return load_polytope(args.polytope)
    raise ParseError("need --preset or --polytope")


# ---------------------------------------------------------------------------
# potential / bulk
# ---------------------------------------------------------------------------

def _point_json(pt):
    return {
        "val_vector": [str(v) for v in pt.val_vector],
        "inside": pt.inside,
        "eta": [series_to_json(s) for s in pt.eta],
        "value": series_to_json(pt.critical_value),
        "hessian_val": None if pt.hessian_val is None else str(pt.hessian_val),
    }


def _analyze(P: Polytope, b: BulkDeformation, precision, budget=8):
    W = build_ghv(P, b)
    cert, rep = certify_convenient(W, precision, budget)
    betti = P.vertex_count()
    inside, outside = classify_inside(
        rep.points, P, expected_inside=betti if cert["morse"] else None
    )
    for pt in rep.points:
        hessian_certificate(W, pt)
    kou = P.kouchnirenko_bound()
    denoms = 1
    for pt in rep.points:
        for s in pt.eta:
            k = s.exponent_denominator_lcm()
            denoms = denoms * k // _gcd(denoms, k)
    body = {
        "polytope": P.describe(),
        "bulk": b.describe(),
        "betti": betti,
        "kouchnirenko_bound": kou,
        "delzant": P.delzant_check()[0],
        "points": [_point_json(pt) for pt in rep.points],
        "inside_count": len(inside),
        "outside_count": len(outside),
        "certificates": {
            "morse": cert["morse"],
            "distinct_values": cert["distinct_values"],
            "inside_equals_betti": len(inside) == betti,
            "count_within_bound": len(rep.points) <= kou,
            "saturates_bound": len(rep.points) == kou,
        },
        "precision": str(rep.precision),
        "exponent_denominator": denoms,
    }
    return body, rep, inside


def cmd_potential_analyze(args):
    P = _get_polytope(args)
    b = (
        BulkDeformation.parse(args.bulk, P.N)
        if args.bulk
        else BulkDeformation.trivial(P.N)
    )
    body, rep, _ = _analyze(P, b, Fraction(args.precision), args.field_budget)
    if args.fiber:
        u = [Fraction(x) for x in args.fiber.split(",")]
        fib = build_fiber_potential(P, b, u)
        body["fiber"] = {
            "u": [str(x) for x in u],
            "support_values": [str(v) for v in P.support_values(u)],
            "monomials": [
                {"exponents": list(a), "coeff": series_to_json(c)}
                for a, c in fib.items()
            ],
        }
    return report("potential.analyze", body)


def cmd_bulk_search(args):
    P = _get_polytope(args)
    b = search_convenient_bulk(
        P,
        norm_bound=args.norm_bound,
        trials=args.trials,
        seed=args.seed,
        precision=Fraction(args.precision),
    )
    body, _, _ = _analyze(P, b, Fraction(args.precision))
    body["seed"] = args.seed
    return report("bulk.search", body)


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def _split_json(split):
    return {
        "eigenvalues": [series_to_json(s) for s in split.eigenvalues],
        "idempotents": [[series_to_json(c) for c in e] for e in split.idempotents],
        "valuations": [str(v) for v in split.valuations],
        "precision": str(split.precision),
    }


def cmd_algebra_split(args):
    Z = Fraction(args.precision)
    if args.from_potential:
        name = args.from_potential
        P = preset(name) if name in PRESET_NAMES else load_polytope(name)
        b = search_convenient_bulk(P, seed=args.seed)
        _, rep, inside = _analyze(P, b, Fraction(5))
        A, elem = _diagonal_model(inside)
    elif args.file:
        A = load_algebra(args.file)
        elem = _resolve_element(A, args.element)
    else:
        raise ParseError("need --file or --from-potential")
    split = certify_semisimple(A, elem, Z)
    body = {"algebra": A.describe(), "split": _split_json(split)}
    if args.mod_p:
        split_p, rep_p = mod_p_transfer(A, elem, args.mod_p, Z)
        body["transfer"] = rep_p
        body["split_mod_p"] = _split_json(split_p)
    return report("algebra.split", body)


def _diagonal_model(points):
    """The split model algebra on the interior critical points.

    The distinguished element is the diagonal of the Z-truncated critical
    values (the truncation is the model; certified at that precision).
    """
    field = points[0].eta[0].field
    values = [pt.critical_value.resolved_part() for pt in points]
    A = diagonal_algebra(field, values)
    return A, [v for v in values]


def _resolve_element(A, spec):
    if spec is None:
        coords = A.meta.get("element_coords")
        if coords:
            return coords
        raise ParseError("algebra file has no element; pass --element")
    if spec in A.basis:
        return A.basis_vector(A.basis.index(spec))
    parts = [t.strip() for t in spec.split(",")]
    if len(parts) != A.dim:
        raise ParseError(f"element needs {A.dim} coordinates")
    return [
        NovikovSeries.monomial(A.field, 0, _field_scalar(A.field, t)) for t in parts
    ]


def _field_scalar(field, text):
    q = Fraction(text)
    return field.from_int(q.numerator) / field.from_int(q.denominator)


# ---------------------------------------------------------------------------
# filtered
# ---------------------------------------------------------------------------

def cmd_filtered_barcode(args):
    C = load_complex(args.complex)
    C.validate()
    B = C.barcode()
    return report(
        "filtered.barcode",
        {
            "barcode": B.describe(),
            "endpoint_identity": B.endpoint_identity(),
            "complex": complex_to_json(C),
        },
    )


def cmd_filtered_depth(args):
    C = load_complex(args.complex)
    C.validate()
    return report("filtered.depth", {"boundary_depth": str(C.boundary_depth())})


def cmd_filtered_tau(args):
    C = load_complex(args.complex)
    C.validate()
    return report("filtered.tau", {"total_bar_length": str(C.total_bar_length())})


def cmd_filtered_rho(args):
    C = load_complex(args.complex)
    C.validate()
    coeffs = _parse_cycle(args.cycle, C)
    level, zero_class = C.spectral_invariant(coeffs)
    return report(
        "filtered.rho",
        {
            "rho": "-inf" if zero_class else str(level),
            "zero_class": zero_class,
        },
    )


def _parse_cycle(text: str, C) -> dict:
    """Terms like "x", "2*x", "T^1/2*y": label is the trailing factor."""
    out: dict = {}
    for piece in text.replace("-", "+-").split("+"):
        piece = piece.strip()
        if not piece:
            continue
        label = None
        for g in sorted(C.index, key=len, reverse=True):
            if piece.endswith(g):
                label = g
                scalar_text = piece[: -len(g)].rstrip("*").strip()
                break
        if label is None:
            raise ParseError(f"no generator label in cycle term {piece!r}")
        series = (
            parse_series_text(scalar_text, C.field)
            if scalar_text not in ("", "-")
            else NovikovSeries.from_int(C.field, -1 if scalar_text == "-" else 1)
        )
        out[label] = out.get(label, NovikovSeries.zero(C.field)) + series
    return out


def cmd_filtered_bottleneck(args):
    C1 = load_complex(args.complex)
    C2 = load_complex(args.complex2)
    C1.validate()
    C2.validate()
    d = bottleneck_distance(C1.barcode(), C2.barcode())
    return report(
        "filtered.bottleneck",
        {"distance": "inf" if d == float("inf") else str(d)},
    )


# ---------------------------------------------------------------------------
# tate
# ---------------------------------------------------------------------------

def cmd_tate_check(args):
    C = load_complex(args.complex)
    C.validate()
    if not is_prime(args.p) or args.p == 2:
        raise ParseError("--p must be an odd prime")
    rep = quasi_frobenius_check(C, args.p, args.window)
    rep["quasi_frobenius"] = "ok" if rep.pop("match") else "mismatch"
    rep["ratio"] = (
        str(Fraction(rep["tate_total"]) / Fraction(rep["base_total"]))
        if Fraction(rep["base_total"]) != 0
        else None
    )
    return report("tate.check", rep)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def cmd_pipeline(args):
    P = _get_polytope(args)
    precision = Fraction(args.precision)
    b = search_convenient_bulk(
        P,
        norm_bound=args.norm_bound,
        trials=args.trials,
        seed=args.seed,
        precision=precision,
    )
    body, rep, inside = _analyze(P, b, precision)
    body["seed"] = args.seed
    A, elem = _diagonal_model(inside)
    Zt = Fraction(args.transfer_precision)
    split = certify_semisimple(A, elem, Zt)
    body["algebra"] = {"model": "diagonal-on-interior-points", **_split_json(split)}
    transfers = {}
    for q in (int(t) for t in args.primes.split(",") if t.strip()):
        try:
            _, rep_p = mod_p_transfer(A, elem, q, Zt)
            transfers[str(q)] = rep_p
        except (PrimeTooSmall, NovikitError) as e:
            transfers[str(q)] = {"p": q, "error": type(e).__name__, "detail": str(e)}
    body["transfers"] = transfers
    return report("pipeline", body)


# ---------------------------------------------------------------------------
# misc
# ---------------------------------------------------------------------------

def cmd_presets(args):
    out = {}
    for name in PRESET_NAMES:
        out[name] = preset(name).describe()
    return report("presets", {"presets": out})


def cmd_version(args):
    return report("version", {"version": __version__})


def cmd_selftest(args):
    from .selftest import run_selftest

    failures = run_selftest()
    args.exit_code = 1 if failures else 0
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


if __name__ == "__main__":
    sys.exit(main())
