"""Built-in example suite: one check per contract example, desk-sized.

Run via ``novikit selftest``; prints one line per check and reports the
failure count.  The pytest suite covers the same ground (and much more);
this module exists so a deployed CLI can be smoke-checked without pytest.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DenominatorDivisibleByP,
    NotInterior,
    PrimeTooSmall,
    ReduciblePolynomial,
)
from .fields import (
    QI,
    QQ,
    GaussianRat,
    PrimeField,
    extend_field,
    reduce_mod_p,
)
from .filtered import Barcode, FilteredComplex, bottleneck_distance
from .polytope import hirzebruch, preset, projective_space
from .potential import (
    BulkDeformation,
    build_fiber_potential,
    build_ghv,
    certify_convenient,
    classify_inside,
    disk_weight,
    ks_evaluate,
    ks_surjectivity_check,
    monomials_up_to_degree,
    solve_critical_points,
)
from .semisimple import (
    certify_semisimple,
    clifford_from_hessian,
    diagonal_algebra,
    discriminant_valuation,
    mod_p_transfer,
    projective_model_algebra,
    projective_model_element,
)
from .series import NovikovSeries
from .tate import (
    borel_homology_ranks,
    borel_morse_complex,
    quasi_frobenius_check,
    smith_demo,
    tensor_power_with_zeta,
    zeta_commutes_with_differential,
    zeta_power_is_identity,
)

F = Fraction


def _checks():
    yield "coeff: unit reduces to unit", lambda: reduce_mod_p(F(1), 5).val == 1
    yield "coeff: 1/2 mod 7 = 4", lambda: reduce_mod_p(F(1, 2), 7).val == 4
    yield "coeff: i mod 5 in {2,3}", lambda: reduce_mod_p(GaussianRat(0, 1), 5).val in (2, 3)
    yield "coeff: p | denominator rejected", lambda: _raises(
        DenominatorDivisibleByP, lambda: reduce_mod_p(F(1, 5), 5)
    )
    yield "coeff: F9 = F3[x]/(x^2+1)", lambda: extend_field(3, [1, 0, 1]).order == 9
    yield "coeff: F25 = F5[x]/(x^2+2)", lambda: extend_field(5, [2, 0, 1]).order == 25
    yield "coeff: x^2+1 reducible mod 5", lambda: _raises(
        ReduciblePolynomial, lambda: extend_field(5, [1, 0, 1])
    )

    def series_checks():
        zero = NovikovSeries.zero(QQ)
        s = NovikovSeries(QQ, ((F(1, 2), F(2)), (F(3), F(-1))))
        ok = zero.valuation() == float("inf") and s.valuation() == F(1, 2)
        t = NovikovSeries(QQ, ((F(1), F(1)), (F(2), F(1))))
        ok = ok and (t + NovikovSeries.monomial(QQ, 1, F(-1))).terms == ((F(2), F(1)),)
        one_minus = NovikovSeries.one(QQ) - NovikovSeries.monomial(QQ, 1)
        one_plus = NovikovSeries.one(QQ) + NovikovSeries.monomial(QQ, 1)
        ok = ok and (one_plus * one_minus).terms == ((F(0), F(1)), (F(2), F(-1)))
        inv = one_minus.invert(F(3))
        prod = one_minus * inv
        ok = ok and prod.coeff_at(0) == 1 and all(c == 0 for g, c in prod.terms if 0 < g < 3)
        tr = NovikovSeries(QQ, ((F(0), F(1)), (F(1), F(1)), (F(5), F(1))))
        ok = ok and tr.truncate(2).terms == ((F(0), F(1)), (F(1), F(1)))
        ok = ok and tr.truncate(7) == tr
        red = NovikovSeries(QQ, ((F(0), F(1)), (F(1), F(1, 2)))).reduce_mod_p(7)
        ok = ok and red.coeff_at(1).val == 4
        ok = ok and NovikovSeries.monomial(QQ, 1).rescale_p(3).valuation() == F(1, 3)
        return ok

    yield "novikov: arithmetic/trunc/reduce/rescale block", series_checks

    yield "polytope: cp1 is [0,1] with 2 vertices", lambda: preset("cp1").vertex_count() == 2
    yield "polytope: cpN has N+1 vertices", lambda: all(
        projective_space(n).vertex_count() == n + 1 for n in (1, 2, 3)
    )
    yield "polytope: f2/f4 delzant with 4 vertices", lambda: all(
        preset(nm).delzant_check()[0] and preset(nm).vertex_count() == 4
        for nm in ("f2", "f4")
    )
    yield "polytope: weighted example fails delzant", lambda: not _weighted_p2().delzant_check()[0]
    yield "polytope: simplex barycenter support", lambda: preset("cp2").support_values(
        [F(1, 3), F(1, 3)]
    ) == [F(1, 3), F(1, 3), F(1, 3)]
    yield "polytope: f2 support at (1/2,1/4)", lambda: preset("f2").support_values(
        [F(1, 2), F(1, 4)]
    ) == [F(1, 2), F(1, 4), F(1, 4), F(1)]
    yield "polytope: kouchnirenko cp1=2 cp2=3 f2=4", lambda: [
        preset("cp1").kouchnirenko_bound(),
        preset("cp2").kouchnirenko_bound(),
        preset("f2").kouchnirenko_bound(),
    ] == [2, 3, 4]

    def ghv_checks():
        P = preset("cp1")
        W = build_ghv(P, BulkDeformation.trivial(2))
        ok = set(W.monomials) == {(1,), (-1,)}
        ok = ok and W.monomials[(-1,)].terms == ((F(1), QI.one),)
        fib = build_fiber_potential(P, BulkDeformation.trivial(2), [F(1, 2)])
        ok = ok and all(c.valuation() == F(1, 2) for _a, c in fib.items())
        try:
            build_fiber_potential(P, BulkDeformation.trivial(2), [F(2)])
            return False
        except NotInterior:
            pass
        d = W.log_derivative(0)
        ok = ok and d.monomials[(-1,)].leading()[1] == QI.from_int(-1)
        return ok

    yield "potential: ghv build / fiber / log-derivative", ghv_checks

    def cp1_critical():
        rep = solve_critical_points(build_ghv(preset("cp1"), BulkDeformation.trivial(2)), F(5))
        if len(rep.points) != 2:
            return False
        leads = sorted(repr(pt.eta[0].leading()[1]) for pt in rep.points)
        vals = sorted(repr(pt.critical_value.leading()) for pt in rep.points)
        return (
            leads == ["-1", "1"]
            and all(pt.val_vector == (F(1, 2),) for pt in rep.points)
            and vals == [repr((F(1, 2), QI.from_int(-2))), repr((F(1, 2), QI.from_int(2)))]
        )

    yield "potential: cp1 critical points ±T^(1/2)", cp1_critical

    def f4_example():
        P = preset("f4")
        rep = solve_critical_points(build_ghv(P, BulkDeformation.trivial(4)), F(5))
        inside, outside = classify_inside(rep.points, P)
        return (
            len(rep.points) == 6
            and len(inside) == 4
            and len(outside) == 2
            and all(pt.val_vector[1] == F(1, 4) for pt in inside)
            and all(pt.val_vector[1] == F(3, 2) for pt in outside)
        )

    yield "potential: f4 has 4 inside / 2 outside", f4_example

    def convenient_cp1():
        cert, _ = certify_convenient(build_ghv(preset("cp1"), BulkDeformation.trivial(2)), F(5))
        return cert == {"morse": True, "distinct_values": True}

    yield "potential: cp1 convenient at trivial bulk", convenient_cp1

    def disk_weights():
        P = preset("cp1")
        b = BulkDeformation.trivial(2)
        u = [F(1, 2)]
        y = (NovikovSeries.one(QI),)
        w1, m1 = disk_weight((1, 0), u, P, b, y)
        w0, m0 = disk_weight((0, 0), u, P, b, y)
        w11, m11 = disk_weight((1, 1), u, P, b, y)
        return (
            m1 == 2
            and m0 == 0
            and m11 == 4
            and w1.valuation() == F(1, 2)
            and w0 == NovikovSeries.one(QI)
            and w11.valuation() == F(1)
        )

    yield "potential: disk weights and maslov indices", disk_weights

    def ks_checks():
        P = preset("cp1")
        b = BulkDeformation.trivial(2)
        rep = solve_critical_points(build_ghv(P, b), F(5))
        pts = rep.points
        ones = ks_evaluate((0, 0), P, b, pts)
        ok = all(v.coeff_at(0) == QI.one for v in ones)
        z1 = ks_evaluate((1, 0), P, b, pts)
        ok = ok and sorted(repr(v.leading()[1]) for v in z1) == ["-1", "1"]
        total = [
            ks_evaluate((1, 0), P, b, pts)[i] + ks_evaluate((0, 1), P, b, pts)[i]
            for i in range(2)
        ]
        ok = ok and all(
            not (t - pt.critical_value).terms for t, pt in zip(total, pts)
        )
        rank = ks_surjectivity_check(monomials_up_to_degree(2, 1), P, b, pts)
        ok = ok and rank == 2
        ok = ok and ks_surjectivity_check([(0, 0)], P, b, pts) == 1
        return ok

    yield "potential: ks identities and rank", ks_checks

    def filtered_block():
        C = FilteredComplex(
            QQ,
            [("x", 1, F(0)), ("y", 0, F(0))],
            {"x": {"y": NovikovSeries.monomial(QQ, F(1, 2))}},
            "strict",
        )
        C.validate()
        B = C.barcode()
        ok = B.finite_bars == (F(1, 2),) and B.infinite_bars == 0
        ok = ok and C.boundary_depth() == F(1, 2) == C.boundary_depth_direct()
        ok = ok and C.total_bar_length() == F(1, 2)
        zero = FilteredComplex(QQ, [("a", 0, F(1)), ("b", 1, F(-1))], {}, "strict")
        ok = ok and zero.barcode().infinite_bars == 2
        ok = ok and zero.boundary_depth() == 0
        lvl, flag = zero.spectral_invariant({"a": NovikovSeries.one(QQ)})
        ok = ok and lvl == F(1) and not flag
        lam = NovikovSeries.monomial(QQ, F(-2), F(3))
        lvl2, _ = zero.spectral_invariant({"a": lam})
        ok = ok and lvl2 == F(1) - lam.valuation()
        return ok

    yield "filtered: barcode/depth/tau/rho block", filtered_block

    def bottleneck_checks():
        B = Barcode((F(4),), 0, 2)
        E = Barcode((), 0, 0)
        ok = bottleneck_distance(B, B) == 0
        ok = ok and bottleneck_distance(B, E) == 2
        ok = ok and bottleneck_distance(Barcode((F(10),), 1, 3), Barcode((F(9),), 1, 3)) == 1
        ok = ok and bottleneck_distance(Barcode((), 1, 1), Barcode((), 0, 0)) == float("inf")
        return ok

    yield "filtered: bottleneck distances", bottleneck_checks

    def algebra_block():
        A = diagonal_algebra(QQ, [NovikovSeries.from_int(QQ, 1), NovikovSeries.from_int(QQ, 2)])
        a = A.meta["element_coords"]
        split = certify_semisimple(A, a, F(6))
        ok = split.valuations == [F(0), F(0)]
        dv, _ = discriminant_valuation(A, a)
        ok = ok and dv == 0
        M = projective_model_algebra(1)
        e = projective_model_element(M)
        s1 = certify_semisimple(M, e, F(8))
        ok = ok and s1.valuations == [F(1, 2), F(1, 2)]
        dv1, excl = discriminant_valuation(M, e)
        ok = ok and dv1 == 1 and excl == [2]
        _, rep = mod_p_transfer(M, e, 5, F(8))
        ok = ok and rep["ell_p"] == rep["ell_0"]
        half = diagonal_algebra(
            QQ, [NovikovSeries.monomial(QQ, 0, F(1, 2)), NovikovSeries.from_int(QQ, 3)]
        )
        try:
            mod_p_transfer(half, half.meta["element_coords"], 2, F(6))
            return False
        except PrimeTooSmall:
            pass
        return ok

    yield "semisimple: split/disc/transfer block", algebra_block

    def clifford_block():
        H1 = [[NovikovSeries.monomial(QQ, F(1, 2), F(2))]]
        A1 = clifford_from_hessian(H1)
        xx = A1.multiply(A1.basis_vector(1), A1.basis_vector(1))
        ok = xx[0].terms == ((F(1, 2), F(1)),) and not xx[1].terms
        one = NovikovSeries.one(QQ)
        z = NovikovSeries.zero(QQ)
        A2 = clifford_from_hessian([[one, z], [z, one]])
        x1x2 = A2.multiply(A2.basis_vector(1), A2.basis_vector(2))
        x2x1 = A2.multiply(A2.basis_vector(2), A2.basis_vector(1))
        ok = ok and all(not (a + b).terms for a, b in zip(x1x2, x2x1))
        for i in range(A2.dim):
            for j in range(A2.dim):
                for k in range(A2.dim):
                    lhs = A2.multiply(A2.multiply(A2.basis_vector(i), A2.basis_vector(j)), A2.basis_vector(k))
                    rhs = A2.multiply(A2.basis_vector(i), A2.multiply(A2.basis_vector(j), A2.basis_vector(k)))
                    if any((a - b).terms for a, b in zip(lhs, rhs)):
                        return False
        return ok

    yield "semisimple: clifford relations + associativity", clifford_block

    def borel_block():
        B = borel_morse_complex(3, 2)
        C = B.complex(PrimeField(3))
        C.validate()
        ok = B.equivariant(PrimeField(3))
        ranks3 = borel_homology_ranks(B, PrimeField(3))
        ok = ok and ranks3 == [1, 1, 1, 1, 1, 1]
        ranksq = borel_homology_ranks(B, QQ)
        ok = ok and ranksq[: 2 * B.l_max + 1] == [1, 0, 0, 0, 0]
        return ok

    yield "tate: borel model ranks", borel_block

    def zeta_block():
        F3 = PrimeField(3)
        Cb = FilteredComplex(F3, [("e", 0, F(0)), ("o", 1, F(0))], {}, "verbose")
        power, zeta = tensor_power_with_zeta(Cb, 3)
        ok = zeta["o|o|e"] == ("e|o|o", 1) and zeta["o|e|o"] == ("o|o|e", -1)
        ok = ok and zeta_power_is_identity(zeta, 3)
        Cd = FilteredComplex(
            F3,
            [("e", 0, F(0)), ("o", 1, F(1))],
            {"o": {"e": NovikovSeries.monomial(F3, F(1, 2))}},
            "verbose",
        )
        power2, zeta2 = tensor_power_with_zeta(Cd, 3)
        power2.validate()
        ok = ok and zeta_commutes_with_differential(power2, zeta2)
        return ok

    yield "tate: koszul signs and commutation", zeta_block

    def tate_block():
        F3 = PrimeField(3)
        base = FilteredComplex(
            F3,
            [("x", 1, F(0)), ("y", 0, F(0))],
            {"x": {"y": NovikovSeries.monomial(F3, F(1, 2))}},
            "verbose",
        )
        rep = quasi_frobenius_check(base, 3, 4)
        ok = rep["match"] and rep["tate_total"] == "3/2"
        b0 = FilteredComplex(F3, [("x", 0, F(0))], {}, "verbose")
        rep0 = quasi_frobenius_check(b0, 3, 4)
        ok = ok and rep0["match"] and rep0["tate_torsion"] == []
        return ok

    yield "tate: quasi-frobenius scaling", tate_block

    yield "tate: smith demo k=5", lambda: smith_demo(1, 100, 10, 5)["k"] == 5
    yield "tate: smith demo vacuous", lambda: smith_demo(0, 100, 10, 5)["vacuous"]


def _weighted_p2():
    from .polytope import Polytope

    return Polytope(
        2, (((1, 0), F(0)), ((0, 1), F(0)), ((-1, -2), F(-1))), "weighted"
    )


def _raises(exc, fn) -> bool:
    try:
        fn()
        return False
    except exc:
        return True


def run_selftest() -> int:
    failures = 0
    for name, fn in _checks():
        try:
            ok = bool(fn())
        except Exception as e:  # noqa: BLE001 - report, don't crash the suite
            ok = False
            name = f"{name} [{type(e).__name__}: {e}]"
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1
    print(f"selftest: {failures} failure(s)")
    return failures
