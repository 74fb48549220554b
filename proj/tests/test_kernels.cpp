#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "isopower/kernels.hpp"

using namespace isopower;
using namespace isopower::kernels;
using arith::curve_create;
using arith::field_create;

namespace {

const Bounds kB{};

arith::EllipticCurve E11() { // t = -3 over F_5, End disc -11
    return curve_create(field_create(5, 1, kB), 0, 0, 0, 1, 1);
}
arith::EllipticCurve E4j1728() { // t = 2 over F_5, End = Z[i], f0 = 2
    return curve_create(field_create(5, 1, kB), 0, 0, 0, 1, 0);
}

} // namespace

TEST_CASE("commutant shapes and examples") {
    // ordinary rank 2: C = R_l, basis {1, omega}
    Commutant c = commutant(E11(), 2, 1, kB);
    CHECK(c.shape == Commutant::Shape::Rank2);
    REQUIRE(c.basis.size() == 2);
    CHECK(!modmat::is_scalar(c.basis[1], 2));
    // E/F_5 t=-3 at l=2: Frobenius irreducible, C/2C is the field F_4:
    // omega must have irreducible charpoly or generate F_4-like algebra
    arith::TorsionLattice T = arith::torsion_basis(E11(), 2, 1, kB);
    CHECK(modmat::mul(c.basis[1], T.frob, 2) == modmat::mul(T.frob, c.basis[1], 2));

    // t=2 curve (pi scalar mod 2 but R_2 has rank 2): the End action is
    // non-scalar mod 2 thanks to the lift-and-divide saturation
    Commutant c2 = commutant(E4j1728(), 2, 1, kB);
    CHECK(c2.shape == Commutant::Shape::Rank2);
    CHECK(!modmat::is_scalar(c2.basis[1], 2));

    // maximal curve over F_4: rank 4, C = scalars
    arith::Embedding emb = arith::embed_field(field_create(2, 1, kB), field_create(2, 2, kB));
    auto Emax = arith::base_change(curve_create(field_create(2, 1, kB), 0, 0, 1, 0, 0), emb);
    Commutant c3 = commutant(Emax, 3, 1, kB);
    CHECK(c3.shape == Commutant::Shape::ZlCenter);
    CHECK(c3.basis.size() == 1);

    CHECK_THROWS_AS(commutant(E11(), 5, 1, kB), Error); // l = p
}

TEST_CASE("is_kernel_subgroup basics") {
    auto E = E11();
    // G = 0 and G = E[l^e] are kernel subgroups (of identity and of l^e)
    SubgroupData zero{2, 1, 1, {}};
    CHECK(is_kernel_subgroup(E, zero, kB));
    SubgroupData full{2, 1, 1, {{1, 0}, {0, 1}}};
    CHECK(is_kernel_subgroup(E, full, kB));

    // t=-3 at l=2: Frobenius irreducible, so 0 and E[2] are the only stable
    // subgroups; both are kernel subgroups
    auto stable = frobenius_stable_subgroups(E, 2, 1, 1, kB);
    CHECK(stable.size() == 2);

    // t=2 curve at l=2: pi = 1 mod 2, every subgroup stable; the three
    // order-2 lines are decided by C/2C-stability and at least one fails
    auto E2 = E4j1728();
    auto stable2 = frobenius_stable_subgroups(E2, 2, 1, 1, kB);
    CHECK(stable2.size() == 5); // 0, three lines, E[2]
    int fails = 0;
    for (i64 x = 0; x <= 2; x++) {
        SubgroupData line{2, 1, 1, {{x == 2 ? 0 : 1, x == 2 ? 1 : x}}};
        if (!is_kernel_subgroup(E2, line, kB)) fails++;
    }
    CHECK(fails > 0);

    // non-stable subgroup raises NotGaloisStable
    // (for t=-3 any order-2 line is moved by the irreducible Frobenius)
    SubgroupData bad{2, 1, 1, {{1, 0}}};
    CHECK_THROWS_AS(is_kernel_subgroup(E, bad, kB), Error);
}

TEST_CASE("brute force kernel oracle equals the criterion set") {
    std::vector<arith::EllipticCurve> curves = {
        E11(), E4j1728(),
        curve_create(field_create(5, 1, kB), 0, 0, 0, 1, 2), // t=2, End=Z[2i]
        curve_create(field_create(7, 1, kB), 0, 0, 0, 1, 1),
        curve_create(field_create(3, 1, kB), 0, 0, 0, 1, 2),
    };
    for (const auto& E : curves) {
        for (i64 l : {2, 3}) {
            if (l == E.field->p) continue;
            for (int r : {1, 2}) {
                SubgroupSet oracle;
                try {
                    oracle = brute_force_kernels(E, l, 1, r, 4, kB);
                } catch (const Error& e) {
                    if (e.kind() == ErrorKind::DenominatorClash ||
                        e.kind() == ErrorKind::BoundExceeded)
                        continue;
                    throw;
                }
                auto stable = frobenius_stable_subgroups(E, l, 1, r, kB);
                SubgroupSet criterion;
                for (const auto& S : stable) {
                    std::vector<std::vector<i64>> gens(S.begin(), S.end());
                    SubgroupData G{l, 1, r, gens};
                    if (is_kernel_subgroup(E, G, kB)) criterion.insert(S);
                }
                CHECK(oracle == criterion);
                // kernel subgroups are closed under intersection
                for (const auto& A : oracle)
                    for (const auto& B : oracle) {
                        std::set<std::vector<i64>> inter;
                        std::set_intersection(A.begin(), A.end(), B.begin(), B.end(),
                                              std::inserter(inter, inter.begin()));
                        CHECK(oracle.count(inter) == 1);
                    }
            }
        }
    }
}

TEST_CASE("products of kernel subgroups") {
    // G1 x G2 is a kernel subgroup of E^2 iff both are (Prop 6.2(b) shape)
    auto E = E4j1728();
    auto oracle1 = brute_force_kernels(E, 2, 1, 1, 4, kB);
    auto oracle2 = brute_force_kernels(E, 2, 1, 2, 4, kB);
    auto stable1 = frobenius_stable_subgroups(E, 2, 1, 1, kB);
    for (const auto& A : stable1)
        for (const auto& B : stable1) {
            std::set<std::vector<i64>> prod;
            for (const auto& a : A)
                for (const auto& b : B) prod.insert({a[0], a[1], b[0], b[1]});
            bool lhs = oracle2.count(prod) == 1;
            bool rhs = oracle1.count(A) == 1 && oracle1.count(B) == 1;
            CHECK(lhs == rhs);
        }
}

TEST_CASE("galois_image_test") {
    // {identity} with dim C > 1: not surjective
    std::vector<M2> c2 = {M2::identity(), M2{0, 1, 1, 1}};
    GaloisImageReport r1 = galois_image_test({M2::identity()}, c2, 2);
    CHECK(!r1.surjective);
    CHECK(r1.obstruction == GaloisImageReport::Obstruction::ProperSubalgebra);

    // Frobenius of E/F_5 t=-3 at l=2 against C/2C = F_4: surjective
    arith::TorsionLattice T = arith::torsion_basis(E11(), 2, 1, kB);
    Commutant C = commutant(E11(), 2, 1, kB);
    GaloisImageReport r2 = galois_image_test({T.frob}, C.basis, 2);
    CHECK(r2.surjective);

    // upper-triangular nonscalar generators against M_2: Borel
    std::vector<M2> m2full = {M2{1, 0, 0, 0}, M2{0, 1, 0, 0}, M2{0, 0, 1, 0}, M2{0, 0, 0, 1}};
    GaloisImageReport r3 =
        galois_image_test({M2{1, 1, 0, 1}, M2{1, 0, 0, 2}}, m2full, 3);
    CHECK(!r3.surjective);
    CHECK(r3.obstruction == GaloisImageReport::Obstruction::Borel);

    // nonsplit Cartan: multiplicative group of F_9 inside GL_2(F_3)
    GaloisImageReport r4 = galois_image_test({M2{1, 1, 2, 1}}, m2full, 3);
    CHECK(!r4.surjective);
    CHECK(r4.obstruction == GaloisImageReport::Obstruction::NonsplitCartan);

    // full image: GL_2(F_3) generators span M_2
    GaloisImageReport r5 = galois_image_test({M2{1, 1, 0, 1}, M2{0, 2, 1, 0}}, m2full, 3);
    CHECK(r5.surjective);

    CHECK_THROWS_AS(galois_image_test({M2{1, 1, 1, 1}}, m2full, 3), Error);
}
