#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "isopower/modules.hpp"
#include "oracles.hpp"

using namespace isopower;
using namespace isopower::modules;
using orders::ClassGroup;
using orders::ideal_from_form;
using orders::KElem;
using orders::order_from_disc;
using orders::principal_form;
using orders::QuadForm;
using orders::QuadIdeal;
using orders::QuadOrder;

namespace {

const Bounds kB{};

QuadIdeal unit_ideal(const QuadOrder& R) { return ideal_from_form(R, principal_form(R)); }

QuadIdeal ideal_from_lattice(const QuadOrder& owner, const orders::KLat& L) {
    QuadIdeal I;
    I.owner = owner;
    I.zbasis = L;
    I.form = orders::form_from_lattice(L, owner);
    return I;
}

} // namespace

TEST_CASE("module_from_ideals examples") {
    QuadOrder R15 = order_from_disc(-15);
    RModule free1 = module_from_ideals(R15, {unit_ideal(R15)});
    CHECK(free1.rank == 1);

    QuadIdeal I = ideal_from_form(R15, {2, 1, 2});
    RModule M2 = module_from_ideals(R15, {ideal_from_form(R15, {1, 1, 4}), I});
    CHECK(M2.rank == 2);

    QuadOrder R16 = order_from_disc(-16);
    QuadOrder OK4 = order_from_disc(-4);
    RModule Mok = module_from_ideals(R16, {unit_ideal(OK4)});
    CHECK(Mok.rank == 1);
    CHECK(Mok.base == R16);

    CHECK_THROWS_AS(module_from_ideals(OK4, {unit_ideal(R16)}), Error);
}

TEST_CASE("normal form of free modules and permutation invariance") {
    for (i64 D : {-15, -16, -11, -96}) {
        QuadOrder R = order_from_disc(D);
        for (int n = 1; n <= 3; n++) {
            std::vector<QuadIdeal> ideals(n, unit_ideal(R));
            ModuleNF nf = normal_form(module_from_ideals(R, ideals));
            CHECK(nf.conductors == std::vector<i64>(n, R.f));
            CHECK(nf.steinitz == principal_form(R));
        }
    }
    QuadOrder R15 = order_from_disc(-15);
    QuadIdeal I = ideal_from_form(R15, {2, 1, 2});
    ModuleNF a = normal_form(module_from_ideals(R15, {unit_ideal(R15), I}));
    ModuleNF b = normal_form(module_from_ideals(R15, {I, unit_ideal(R15)}));
    CHECK(a == b);
}

TEST_CASE("normal form detects Steinitz class through products") {
    QuadOrder R15 = order_from_disc(-15);
    QuadIdeal I = ideal_from_form(R15, {2, 1, 2});
    ModuleNF nf = normal_form(module_from_ideals(R15, {I, I}));
    CHECK(nf.conductors == std::vector<i64>{1, 1});
    CHECK(nf.steinitz == principal_form(R15));
    ModuleNF nf2 = normal_form(module_from_ideals(R15, {unit_ideal(R15), I}));
    CHECK(nf2.conductors == std::vector<i64>{1, 1});
    CHECK(nf2.steinitz == QuadForm{2, 1, 2});
}

TEST_CASE("is_isomorphic examples") {
    QuadOrder R15 = order_from_disc(-15);
    QuadIdeal I = ideal_from_form(R15, {2, 1, 2});
    RModule RR = module_from_ideals(R15, {unit_ideal(R15), unit_ideal(R15)});
    RModule II = module_from_ideals(R15, {I, I});
    RModule RI = module_from_ideals(R15, {unit_ideal(R15), I});
    CHECK(is_isomorphic(RR, RR));
    CHECK(is_isomorphic(RR, II));
    CHECK(!is_isomorphic(RR, RI));
    QuadOrder R16 = order_from_disc(-16);
    RModule other = module_from_ideals(R16, {unit_ideal(R16)});
    CHECK_THROWS_AS(is_isomorphic(RR, other), Error);
}

TEST_CASE("mixed-owner chains") {
    QuadOrder R16 = order_from_disc(-16);
    QuadOrder OK4 = order_from_disc(-4);
    RModule M = module_from_ideals(R16, {unit_ideal(R16), unit_ideal(OK4)});
    ModuleNF nf = normal_form(M);
    CHECK(nf.conductors == std::vector<i64>{2, 1});
    CHECK(nf.steinitz == principal_form(OK4));
    RModule M2 = module_from_ideals(R16, {unit_ideal(OK4), unit_ideal(R16)});
    CHECK(normal_form(M2) == nf);
}

TEST_CASE("module_from_presentation basics") {
    QuadOrder R15 = order_from_disc(-15);
    RModule F2 = module_from_presentation(R15, 0, 2, {});
    CHECK(F2.rank == 2);
    CHECK(normal_form(F2).steinitz == principal_form(R15));

    CHECK_THROWS_AS(module_from_presentation(R15, 1, 1, {KElem{3, 0}}), Error);
    try {
        module_from_presentation(R15, 1, 1, {KElem{3, 0}});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HasTorsion);
        CHECK(e.message().find("3") != std::string::npos);
    }
}

TEST_CASE("presentations of the maximal order over Z[2i]") {
    QuadOrder R16 = order_from_disc(-16);
    // The one-relation matrix (2i, -2): its honest cokernel carries a Z/2
    // torsion part (the relation lattice of {1, i} needs two generators), so
    // the strict constructor reports HasTorsion of exponent 2.
    // 2i = 4 + 2 w_K with w_K = (-4 + sqrt(-4))/2.
    try {
        module_from_presentation(R16, 1, 2, {KElem{4, 2}, KElem{-2, 0}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HasTorsion);
        CHECK(e.message().find("2") != std::string::npos);
    }
    // Full relation module of Z[i] = <1, i>: rows (-2i, 2) and (2, 2i);
    // the cokernel is exactly Z[i], rank 1 with multiplier ring O_K.
    RModule M = module_from_presentation(
        R16, 2, 2, {KElem{-4, -2}, KElem{2, 0}, KElem{2, 0}, KElem{4, 2}});
    CHECK(M.rank == 1);
    ModuleNF nf = normal_form(M);
    CHECK(nf.conductors == std::vector<i64>{1});
    CHECK(nf.steinitz == principal_form(order_from_disc(-4)));
    RModule direct = module_from_ideals(R16, {unit_ideal(order_from_disc(-4))});
    CHECK(is_isomorphic(M, direct));
}

TEST_CASE("rank-1 normal form owner equals the multiplier ring") {
    for (i64 D : {-15, -16, -32, -96}) {
        QuadOrder R = order_from_disc(D);
        for (const QuadOrder& S : orders::suborder_chain_candidates(R)) {
            for (const QuadForm& q : orders::class_group(S, kB).reps) {
                QuadIdeal I = ideal_from_form(S, q);
                RModule M = module_from_ideals(R, {I});
                ModuleNF nf = normal_form(M);
                CHECK(nf.conductors == std::vector<i64>{S.f});
                CHECK(orders::multiplier_ring(I.zbasis, R.dK) == S);
            }
        }
    }
}

TEST_CASE("dual module examples and involution") {
    QuadOrder R15 = order_from_disc(-15);
    RModule Rfree = module_from_ideals(R15, {unit_ideal(R15)});
    CHECK(is_isomorphic(dual_module(Rfree), Rfree));

    QuadIdeal I = ideal_from_form(R15, {2, 1, 2});
    for (const RModule& M : {module_from_ideals(R15, {unit_ideal(R15), I}),
                             module_from_ideals(R15, {I, I}),
                             module_from_ideals(R15, {I})}) {
        RModule dd = dual_module(dual_module(M));
        CHECK(is_isomorphic(M, dd));
    }

    QuadOrder R4 = order_from_disc(-4);
    RModule M4 = module_from_ideals(R4, {unit_ideal(R4), unit_ideal(R4)});
    CHECK(is_isomorphic(dual_module(M4), M4));
}

TEST_CASE("enumerate_modules examples") {
    CHECK(enumerate_modules(order_from_disc(-11), 1, kB).size() == 1);
    auto e16 = enumerate_modules(order_from_disc(-16), 1, kB);
    REQUIRE(e16.size() == 2);
    CHECK(e16[0].conductors == std::vector<i64>{2});
    CHECK(e16[1].conductors == std::vector<i64>{1});
    auto e15 = enumerate_modules(order_from_disc(-15), 2, kB);
    REQUIRE(e15.size() == 2);
    CHECK(e15[0].steinitz == QuadForm{1, 1, 4});
    CHECK(e15[1].steinitz == QuadForm{2, 1, 2});

    for (i64 D : {-16, -32, -36, -48, -96, -144}) {
        QuadOrder R = order_from_disc(D);
        size_t expect = 0;
        for (const QuadOrder& S : orders::suborder_chain_candidates(R))
            expect += orders::class_group(S, kB).reps.size();
        CHECK(enumerate_modules(R, 1, kB).size() == expect);
    }
}

TEST_CASE("enumerated normal forms round-trip through module_from_nf") {
    for (i64 D : {-16, -15, -96}) {
        QuadOrder R = order_from_disc(D);
        for (int n = 1; n <= 2; n++)
            for (const ModuleNF& nf : enumerate_modules(R, n, kB)) {
                RModule M = module_from_nf(R, nf);
                CHECK(normal_form(M) == nf);
            }
    }
}

TEST_CASE("normal form invariance under randomized re-decompositions") {
    std::mt19937 rng(2024);
    for (i64 D : {-15, -16, -96}) {
        QuadOrder R = order_from_disc(D);
        for (const ModuleNF& nf : enumerate_modules(R, 2, kB)) {
            std::vector<QuadIdeal> base_ideals;
            {
                i64 f1 = nf.conductors[0], f2 = nf.conductors[1];
                QuadOrder R1{f1 * f1 * R.dK, R.dK, f1};
                QuadOrder R2{f2 * f2 * R.dK, R.dK, f2};
                base_ideals = {ideal_from_form(R1, principal_form(R1)),
                               ideal_from_form(R2, nf.steinitz)};
            }
            for (int trial = 0; trial < 25; trial++) {
                std::vector<QuadIdeal> ideals = base_ideals;
                for (auto& I : ideals) {
                    std::uniform_int_distribution<int> small(-3, 3);
                    KElem x{small(rng), small(rng)};
                    x.y *= I.owner.f;
                    if (x.x == 0 && x.y == 0) x.x = 1;
                    I = ideal_from_lattice(I.owner,
                                           orders::klat_scale(I.zbasis, x, R.dK));
                }
                if (trial % 2) std::swap(ideals[0], ideals[1]);
                RModule M = module_from_ideals(R, ideals);
                CHECK(normal_form(M) == nf);
            }
        }
    }
}

TEST_CASE("pair replacement (I, J) -> (S, I J) preserves the class") {
    // same-owner ideals of coprime norm: I + J = S splits off the unit ideal
    QuadOrder R = order_from_disc(-47);
    QuadIdeal I = ideal_from_form(R, {2, 1, 6});
    QuadIdeal J = ideal_from_form(R, {3, 1, 4});
    RModule M1 = module_from_ideals(R, {I, J});
    QuadIdeal IJ = orders::ideal_arith(I, J, orders::IdealOp::Compose);
    RModule M2 = module_from_ideals(R, {unit_ideal(R), IJ});
    CHECK(is_isomorphic(M1, M2));
}

TEST_CASE("maximal order: normal form = (rank, determinant class)") {
    QuadOrder R = order_from_disc(-47);
    ClassGroup G = orders::class_group(R, kB);
    std::mt19937 rng(7);
    std::uniform_int_distribution<size_t> pick(0, G.reps.size() - 1);
    for (int trial = 0; trial < 10; trial++) {
        QuadForm q1 = G.reps[pick(rng)], q2 = G.reps[pick(rng)];
        RModule M = module_from_ideals(R, {ideal_from_form(R, q1), ideal_from_form(R, q2)});
        ModuleNF nf = normal_form(M);
        CHECK(nf.conductors == std::vector<i64>{1, 1});
        CHECK(nf.steinitz == orders::compose(R, q1, q2));
    }
}

TEST_CASE("explicit-iso oracle agrees with normal-form equality (small corpus)") {
    for (i64 D : {-15, -16, -20}) {
        QuadOrder R = order_from_disc(D);
        std::vector<RModule> mods;
        for (int n = 1; n <= 2; n++)
            for (const ModuleNF& nf : enumerate_modules(R, n, kB))
                mods.push_back(module_from_nf(R, nf));
        for (size_t i = 0; i < mods.size(); i++)
            for (size_t j = i; j < mods.size(); j++) {
                if (mods[i].rank != mods[j].rank) continue;
                bool nf_eq = normal_form(mods[i]) == normal_form(mods[j]);
                bool oracle = test_oracles::module_iso_oracle(mods[i], mods[j]);
                CHECK(nf_eq == oracle);
            }
    }
}
