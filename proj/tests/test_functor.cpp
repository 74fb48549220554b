#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "isopower/functor.hpp"

using namespace isopower;
using namespace isopower::functor;
using arith::curve_create;
using arith::field_create;
using modules::module_from_ideals;
using modules::RModule;
using orders::ideal_from_form;
using orders::KElem;
using orders::order_from_disc;
using orders::principal_form;
using orders::QuadIdeal;
using orders::QuadOrder;

namespace {

const Bounds kB{};

arith::EllipticCurve E11() { // y^2 = x^3 + x + 1 / F_5: t = -3, End disc -11
    return curve_create(field_create(5, 1, kB), 0, 0, 0, 1, 1);
}
arith::EllipticCurve E16sat() { // y^2 = x^3 + x + 2 / F_5: t = 2, End = Z[2i]
    return curve_create(field_create(5, 1, kB), 0, 0, 0, 1, 2);
}
arith::EllipticCurve E4j1728() { // y^2 = x^3 + x / F_5: t = 2, End = Z[i]
    return curve_create(field_create(5, 1, kB), 0, 0, 0, 1, 0);
}
arith::EllipticCurve E15() { // y^2 = x^3 + x + 11 / F_19: t = 4, End = O_{-15}
    return curve_create(field_create(19, 1, kB), 0, 0, 0, 1, 11);
}

QuadIdeal unit_ideal(const QuadOrder& R) { return ideal_from_form(R, principal_form(R)); }

RModule free_module(const QuadOrder& R, int n) {
    return module_from_ideals(R, std::vector<QuadIdeal>(n, unit_ideal(R)));
}

} // namespace

TEST_CASE("curve order data examples") {
    CurveOrderData a = curve_order_data(E11(), kB);
    CHECK(a.t == -3);
    CHECK(a.f0 == 1);
    CHECK(a.fE == 1);
    CHECK(!a.supersingular);

    CurveOrderData b = curve_order_data(E4j1728(), kB);
    CHECK(b.t == 2);
    CHECK(b.f0 == 2);
    CHECK(b.fE == 1); // pi = 1 + 2i acts as 1 on E[2]

    CurveOrderData c = curve_order_data(E16sat(), kB);
    CHECK(c.f0 == 2);
    CHECK(c.fE == 2);

    // maximal curve over F_4: rank-4 tag
    arith::Field F4 = field_create(2, 2, kB);
    arith::Embedding emb = arith::embed_field(field_create(2, 1, kB), F4);
    auto Emax = arith::base_change(curve_create(field_create(2, 1, kB), 0, 0, 1, 0, 0), emb);
    CurveOrderData d = curve_order_data(Emax, kB);
    CHECK(d.t == -4);
    CHECK(d.rank4);
}

TEST_CASE("hom_torsion: free modules reproduce curve torsion") {
    auto E = E11();
    QuadOrder R = order_from_disc(-11);
    RModule M1 = free_module(R, 1);

    // A[l^e] = E[l^e] with the same Frobenius char poly
    for (auto [l, e] : std::vector<std::pair<i64, int>>{{2, 1}, {3, 1}, {2, 2}}) {
        TorsionRealization tr = hom_torsion(M1, E, l, e, kB);
        i64 L = tr.mod;
        CHECK(tr.order == Z(L) * L);
        REQUIRE(tr.frob_valid);
        arith::TorsionLattice T = arith::torsion_basis(E, l, e, kB);
        auto cp = char_poly(tr.frob);
        REQUIRE(cp.size() == 3);
        CHECK(((cp[1] + modmat::trace(T.frob, L)) % L) == 0); // -t coefficient
        CHECK(((cp[0] - modmat::det(T.frob, L)) % L) == 0);
    }

    // M = R^2: rank-4 realization, block char poly = (curve char poly)^2
    RModule M2 = free_module(R, 2);
    TorsionRealization tr = hom_torsion(M2, E, 3, 1, kB);
    CHECK(tr.order == 81);
    CHECK(tr.structure.size() == 4);
    REQUIRE(tr.frob_valid);
    auto cp = char_poly(tr.frob);
    REQUIRE(cp.size() == 5);
    // (x^2 + 3x + 5)^2 = x^4 + 6x^3 + 19x^2 + 30x + 25 -> mod 3
    CHECK(((cp[3] - 6) % 3) == 0);
    CHECK(((cp[2] - 19) % 3) == 0);
    CHECK(((cp[1] - 30) % 3) == 0);
    CHECK(((cp[0] - 25) % 3) == 0);

    // l = p rejected
    CHECK_THROWS_AS(hom_torsion(M1, E, 5, 1, kB), Error);
    // group order = l^{2 e rk} in the saturated corpus
    for (auto& mod : {M1, M2}) {
        TorsionRealization t2 = hom_torsion(mod, E, 2, 1, kB);
        Z expect = 1;
        for (int i = 0; i < 2 * mod.rank; i++) expect *= 2;
        CHECK(t2.order == expect);
    }
}

TEST_CASE("hom_torsion DenominatorClash contract") {
    // base Z[i] over the j=1728 curve: omega = (pi-1)/2 has denominator 2
    auto E = E4j1728();
    QuadOrder OK = order_from_disc(-4);
    RModule M = free_module(OK, 1);
    CHECK_THROWS_AS(hom_torsion(M, E, 2, 1, kB), Error);
    try {
        hom_torsion(M, E, 2, 1, kB);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DenominatorClash);
    }
    // but l = 3 works fine
    TorsionRealization tr = hom_torsion(M, E, 3, 1, kB);
    CHECK(tr.order == 9);
}

TEST_CASE("hom_point_count examples and multiplicativity") {
    auto E = E11();
    QuadOrder R = order_from_disc(-11);
    CHECK(hom_point_count(free_module(R, 1), E, 1, kB) == 9);
    CHECK(hom_point_count(free_module(R, 2), E, 1, kB) == 81);

    // counts over extensions match the Weil numbers for every corpus pair
    for (int m = 1; m <= 3; m++) {
        Z nm = arith::count_ext(-3, 5, m);
        CHECK(hom_point_count(free_module(R, 1), E, m, kB) == nm);
        CHECK(hom_point_count(free_module(R, 2), E, m, kB) == nm * nm);
    }

    // disc -16 corpus: rank-1 nonfree module over the End = Z[2i] curve;
    // the count equals the count of the j=1728 curve in the isogeny class.
    auto E2 = E16sat();
    QuadOrder R16 = order_from_disc(-16);
    QuadOrder OK = order_from_disc(-4);
    RModule Mok = module_from_ideals(R16, {unit_ideal(OK)});
    Z c = hom_point_count(Mok, E2, 1, kB);
    CHECK(c == arith::point_count(E4j1728(), 1, kB).count);
    CHECK(c == 4);

    // multiplicativity over direct sums (mixed owners)
    RModule Msum = module_from_ideals(R16, {unit_ideal(R16), unit_ideal(OK)});
    for (int m = 1; m <= 3; m++) {
        Z lhs = hom_point_count(Msum, E2, m, kB);
        Z rhs = hom_point_count(module_from_ideals(R16, {unit_ideal(R16)}), E2, m, kB) *
                hom_point_count(Mok, E2, m, kB);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("saturation counterexample: presentation route") {
    // Z[2i]-presentation (2i, -2) applied to the End = Z[i] curve gives the
    // E x E[2] signature: counts and torsion exceed the abelian-variety
    // prediction exactly by #E[2] = 4 where E[2] is rational.
    auto E = E4j1728();
    QuadOrder R16 = order_from_disc(-16);
    std::vector<KElem> X = {KElem{4, 2}, KElem{-2, 0}}; // (2i, -2)
    CHECK(!is_saturated(R16, E, kB));

    Z n1 = arith::point_count(E, 1, kB).count; // 4, E[2] fully rational
    Z c1 = hom_count_presentation(R16, 1, 2, X, E, 1, kB);
    CHECK(c1 == 4 * n1);

    TorsionRealization tr = hom_torsion_presentation(R16, 1, 2, X, E, 2, 1, kB);
    CHECK(tr.order == 16); // l^{2 e rk} = 4 times the extra factor 4
    CHECK(!tr.frob_valid ? true : tr.order == 16);

    // Over the saturated curve E'' (End = Z[2i]) the same matrix still has a
    // cokernel with a Z/2 torsion part, contributing the Thm-4.4(e) factor
    // (#T)^{2/rk R} = 2 on top of the rank-1 count N_m.
    auto E2 = E16sat();
    CHECK(is_saturated(R16, E2, kB));
    for (int m = 1; m <= 3; m++) {
        Z nm = arith::count_ext(2, 5, m);
        Z c = hom_count_presentation(R16, 1, 2, X, E2, m, kB);
        CHECK(c == 2 * nm);
    }
}

TEST_CASE("kernel_of_ideal examples") {
    auto E = E11();
    QuadOrder R = order_from_disc(-11);

    // I = nR: E[n], order n^2 (n = 4 would need E[16] beyond the field cap)
    for (i64 n : {2, 3}) {
        QuadIdeal In = unit_ideal(R);
        In.zbasis = orders::klat_scale(In.zbasis, KElem{n, 0}, R.dK);
        In.form = orders::form_from_lattice(In.zbasis, R);
        KernelReport rep = kernel_of_ideal(E, In, kB);
        CHECK(rep.norm == Z(n) * n);
        CHECK(rep.prime_to_p_order == Z(n) * n);
        CHECK(!rep.p_part_inferred);
    }

    // I = (pi - 1): kernel is E(F_q), order #E(F_q) = #(R/I)
    CurveOrderData cd = curve_order_data(E, kB);
    QuadIdeal Ipi = unit_ideal(R);
    Ipi.zbasis = orders::klat_scale(Ipi.zbasis, KElem{cd.c0 - 1, cd.f0}, R.dK);
    Ipi.form = orders::form_from_lattice(Ipi.zbasis, R);
    KernelReport rep = kernel_of_ideal(E, Ipi, kB);
    CHECK(rep.norm == 9);
    CHECK(rep.prime_to_p_order == 9);

    // disc -15 corpus: norm-2 ideal gives an order-2 kernel
    auto E5 = E15();
    QuadOrder R15 = order_from_disc(-15);
    QuadIdeal I2 = ideal_from_form(R15, {2, 1, 2});
    KernelReport rep2 = kernel_of_ideal(E5, I2, kB);
    CHECK(rep2.norm == 2);
    CHECK(rep2.prime_to_p_order == 2);

    // multiplicativity over coprime ideals: 2 splits in O_{-15}, so the
    // conjugate pair is coprime and multiplies to (2) with #E[(2)] = 4
    QuadIdeal I2c = orders::ideal_arith(I2, orders::IdealOp::Conjugate);
    I2c.form = orders::reduce(I2c.form);
    QuadIdeal I4 = orders::ideal_arith(I2, I2c, orders::IdealOp::Compose);
    KernelReport rc = kernel_of_ideal(E5, I2c, kB);
    KernelReport r4 = kernel_of_ideal(E5, I4, kB);
    CHECK(r4.norm == 4);
    CHECK(r4.prime_to_p_order == rep2.prime_to_p_order * rc.prime_to_p_order);
}

TEST_CASE("duality_check") {
    // M = R: trivially self-dual
    auto E = E11();
    QuadOrder R = order_from_disc(-11);
    DualityReport rep = duality_check(free_module(R, 1), E, 3, kB);
    CHECK(rep.counts_equal);
    CHECK(rep.charpoly_equal);

    // disc -16 corpus: R + O_K module over the saturated curve, m in {1,2,3}
    auto E2 = E16sat();
    QuadOrder R16 = order_from_disc(-16);
    RModule M = module_from_ideals(
        R16, {unit_ideal(R16), unit_ideal(order_from_disc(-4))});
    DualityReport rep2 = duality_check(M, E2, 3, kB);
    CHECK(rep2.counts_equal);
    CHECK(rep2.charpoly_equal);
    REQUIRE(rep2.counts.size() == 3);
    for (int m = 1; m <= 3; m++) {
        Z nm = arith::count_ext(2, 5, m);
        CHECK(rep2.counts[m - 1] == nm * nm);
    }

    // disc -60 corpus: conductor-2 base over its saturated curve, h(-60) = 2
    auto E60 = curve_create(field_create(19, 1, kB), 0, 0, 0, 2, 6); // t=4, fE=2
    QuadOrder R60 = order_from_disc(-60);
    CHECK(is_saturated(R60, E60, kB));
    QuadIdeal I60 = ideal_from_form(R60, {3, 0, 5});
    RModule M60 = module_from_ideals(R60, {unit_ideal(R60), I60});
    DualityReport rep3 = duality_check(M60, E60, 3, kB);
    CHECK(rep3.counts_equal);
    CHECK(rep3.charpoly_equal);
}

TEST_CASE("is_saturated examples") {
    auto E = E4j1728();
    CHECK(is_saturated(order_from_disc(-4), E, kB));   // R_sub = End E
    CHECK(!is_saturated(order_from_disc(-16), E, kB)); // Z[2i] inside Z[i]
    // Z[pi] = End E on the other curve in the class
    auto E2 = E16sat();
    CHECK(is_saturated(order_from_disc(-16), E2, kB));
    // wrong field entirely
    CHECK_THROWS_AS(is_saturated(order_from_disc(-11), E, kB), Error);
}

TEST_CASE("VarietyModel caches torsion realizations") {
    auto E = E11();
    QuadOrder R = order_from_disc(-11);
    VarietyModel vm(E, free_module(R, 2), kB);
    CHECK(vm.dim() == 2);
    CHECK(vm.saturated());
    const TorsionRealization& a = vm.torsion(2, 1, kB);
    const TorsionRealization& b = vm.torsion(2, 1, kB);
    CHECK(&a == &b); // memoized
    CHECK(vm.count(1, kB) == 81);
}
