#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "isopower/arith.hpp"

using namespace isopower;
using namespace isopower::arith;

namespace {

const Bounds kB{};

// Test-side oracle: monic quadratic over F_p is irreducible iff it has no
// root; scan in the same coefficient order the library claims to use.
std::vector<i64> smallest_irreducible_quadratic(i64 p) {
    for (i64 c1 = 0; c1 < p; c1++)
        for (i64 c0 = 0; c0 < p; c0++) {
            bool has_root = false;
            for (i64 x = 0; x < p && !has_root; x++)
                if ((x * x + c1 * x + c0) % p == 0) has_root = true;
            if (!has_root) return {c0, c1};
        }
    return {};
}

// Test-side oracle: fully naive point count looping over all (x, y).
i64 naive_count_all_pairs(const EllipticCurve& E) {
    const FiniteField& f = *E.field;
    i64 n = 1;
    for (Code x = 0; x < f.q; x++)
        for (Code y = 0; y < f.q; y++)
            if (on_curve(E, CurvePoint::affine(x, y))) n++;
    return n;
}

EllipticCurve make_curve(i64 p, int m, i64 a1, i64 a2, i64 a3, i64 a4, i64 a6) {
    Field F = field_create(p, m, kB);
    return curve_create(F, F->from_int(a1), F->from_int(a2), F->from_int(a3), F->from_int(a4),
                        F->from_int(a6));
}

} // namespace

TEST_CASE("field_create deterministic moduli") {
    Field f5 = field_create(5, 1, kB);
    CHECK(f5->modulus == std::vector<i64>{0}); // prime field convention: modulus x

    Field f4 = field_create(2, 2, kB);
    CHECK(f4->modulus == std::vector<i64>{1, 1}); // x^2 + x + 1

    Field f25 = field_create(5, 2, kB);
    CHECK(f25->modulus == smallest_irreducible_quadratic(5));

    // determinism: two constructions agree
    Field f25b = field_create(5, 2, kB);
    CHECK(f25->same_field(*f25b));

    CHECK_THROWS_AS(field_create(6, 1, kB), Error);
    CHECK_THROWS_AS(field_create(5, 0, kB), Error);
    CHECK_THROWS_AS(field_create(2, 40, kB), Error); // 2^40 over cap
}

TEST_CASE("field arithmetic is a field") {
    for (auto [p, m] : std::vector<std::pair<i64, int>>{{2, 3}, {3, 2}, {7, 2}, {5, 1}}) {
        Field F = field_create(p, m, kB);
        for (Code a = 0; a < F->q; a++) {
            CHECK(F->add(a, F->neg(a)) == 0);
            if (a != 0) {
                CHECK(F->mul(a, F->inv(a)) == F->one());
                // Fermat
                CHECK(F->pow(a, F->q - 1) == F->one());
            }
            for (Code b = 0; b < F->q; b++) {
                CHECK(F->add(a, b) == F->add(b, a));
                CHECK(F->mul(a, b) == F->mul(b, a));
            }
        }
    }
}

TEST_CASE("sqrt and artin-schreier agree with direct search") {
    Field F = field_create(7, 2, kB);
    for (Code a = 0; a < F->q; a++) {
        Code best = -1;
        for (Code z = 0; z < F->q; z++)
            if (F->mul(z, z) == a && (best < 0 || z < best)) best = z;
        auto s = F->sqrt(a);
        CHECK((s ? *s : -1) == best);
    }
    Field F8 = field_create(2, 3, kB);
    for (Code a = 0; a < F8->q; a++) {
        Code best = -1;
        for (Code z = 0; z < F8->q; z++)
            if (F8->add(F8->mul(z, z), z) == a && (best < 0 || z < best)) best = z;
        auto s = F8->artin_schreier(a);
        CHECK((s ? *s : -1) == best);
    }
}

TEST_CASE("embedding is a ring homomorphism") {
    Field F4 = field_create(2, 2, kB);
    Field F16 = field_create(2, 4, kB);
    Embedding e = embed_field(F4, F16);
    for (Code a = 0; a < F4->q; a++)
        for (Code b = 0; b < F4->q; b++) {
            CHECK(e.map(F4->add(a, b)) == F16->add(e.map(a), e.map(b)));
            CHECK(e.map(F4->mul(a, b)) == F16->mul(e.map(a), e.map(b)));
        }
    Field F25 = field_create(5, 2, kB);
    Field F5_6 = field_create(5, 6, kB);
    Embedding e2 = embed_field(F25, F5_6);
    for (Code a = 0; a < 25; a++)
        for (Code b = 0; b < 25; b++)
            CHECK(e2.map(F25->mul(a, b)) == F5_6->mul(e2.map(a), e2.map(b)));
}

TEST_CASE("curve_create validates the discriminant") {
    CHECK_NOTHROW(make_curve(5, 1, 0, 0, 0, 1, 1)); // y^2 = x^3 + x + 1
    CHECK_THROWS_AS(make_curve(5, 1, 0, 0, 0, 0, 0), Error); // y^2 = x^3 cusp
    CHECK_NOTHROW(make_curve(2, 1, 0, 0, 1, 0, 0)); // y^2 + y = x^3 over F_2
}

TEST_CASE("point group law") {
    EllipticCurve E = make_curve(5, 1, 0, 0, 0, 1, 1);
    Field F = E.field;
    CurvePoint P = CurvePoint::affine(F->from_int(0), F->from_int(1));
    REQUIRE(on_curve(E, P));

    CHECK(point_add(E, P, CurvePoint::infinity()) == P);
    CHECK(point_add(E, P, point_neg(E, P)).inf);

    // doubling of (0,1) against the naive affine short-form oracle:
    // lambda = (3x^2+a4)/(2y), x3 = l^2-2x, y3 = l(x-x3)-y.
    i64 lam = ((3 * 0 * 0 + 1) * 3) % 5; // inv(2) = 3 mod 5
    i64 x3 = ((lam * lam - 0) % 5 + 5) % 5;
    i64 y3 = ((lam * (0 - x3) - 1) % 5 + 5) % 5;
    CurvePoint D = point_add(E, P, P);
    CHECK(D == CurvePoint::affine(F->from_int(x3), F->from_int(y3)));
    CHECK(on_curve(E, D));

    // field mismatch guard
    Field other = field_create(7, 1, kB);
    CHECK_THROWS_AS(point_op(E, other, P, P), Error);
    CHECK_NOTHROW(point_op(E, F, P, P));
}

TEST_CASE("point_count matches spec examples and the all-pairs oracle") {
    EllipticCurve E1 = make_curve(5, 1, 0, 0, 0, 0, 1); // y^2 = x^3 + 1
    CountResult r1 = point_count(E1, 1, kB);
    CHECK(r1.count == 6);
    CHECK(r1.trace == 0);

    EllipticCurve E2 = make_curve(5, 1, 0, 0, 0, 1, 1); // y^2 = x^3 + x + 1
    CountResult r2 = point_count(E2, 1, kB);
    CHECK(r2.count == 9);
    CHECK(r2.trace == -3);

    EllipticCurve E3 = make_curve(2, 1, 0, 0, 1, 0, 0); // y^2 + y = x^3
    CHECK(point_count(E3, 2, kB).count == 9);

    // Weil recurrence vs naive enumeration over extensions (m <= 3)
    for (const EllipticCurve& E : {E1, E2, E3}) {
        CHECK(count_points_naive(E, kB) == naive_count_all_pairs(E));
        i64 t = point_count(E, 1, kB).trace;
        for (int m = 2; m <= 3; m++) {
            Field big = field_create(E.field->p, E.field->m * m, kB);
            EllipticCurve Em = base_change(E, embed_field(E.field, big));
            CHECK(naive_count_all_pairs(Em) == count_ext(t, E.field->q, m));
        }
    }
}

TEST_CASE("group structure examples") {
    // y^2 + y = x^3 over F_4: (3,3)
    EllipticCurve E3 = make_curve(2, 1, 0, 0, 1, 0, 0);
    GroupStructure g = group_structure(E3, 2, kB);
    CHECK(g.d1 == 3);
    CHECK(g.d2 == 3);

    // y^2 = x^3 + x + 1 / F_5: (1, 9)
    EllipticCurve E2 = make_curve(5, 1, 0, 0, 0, 1, 1);
    GroupStructure g2 = group_structure(E2, 1, kB);
    CHECK(g2.d1 == 1);
    CHECK(g2.d2 == 9);
    CHECK(point_order(g2.curve, g2.g2, 9) == 9);

    // y^2 = x^3 + x / F_5: (2, 2); all points 2-torsion
    EllipticCurve E4 = make_curve(5, 1, 0, 0, 0, 1, 0);
    GroupStructure g4 = group_structure(E4, 1, kB);
    CHECK(g4.d1 == 2);
    CHECK(g4.d2 == 2);
    CHECK(point_add(g4.curve, g4.g2, g4.g2).inf);

    // invariants: d1*d2 = N, d1 | d2, d1 | q^m - 1
    for (auto& gs : {g, g2, g4}) {
        CHECK(gs.d1 * gs.d2 == gs.n);
        CHECK(gs.d2 % gs.d1 == 0);
        CHECK((gs.curve.field->q - 1) % gs.d1 == 0);
    }
}

TEST_CASE("torsion basis examples and invariants") {
    // E/F_5 with t = -3: frob mod 2 has irreducible charpoly x^2+x+1
    EllipticCurve E = make_curve(5, 1, 0, 0, 0, 1, 1);
    TorsionLattice T = torsion_basis(E, 2, 1, kB);
    CHECK(T.ext_degree == 3); // order of frobenius mod 2 is 3
    CHECK(modmat::trace(T.frob, 2) == 1);
    CHECK(modmat::det(T.frob, 2) == 1);
    i64 s;
    CHECK(!modmat::is_scalar(T.frob, 2, &s));

    // y^2 = x^3 + x / F_5, t=2: E[2] rational, frob = identity mod 2
    EllipticCurve E2 = make_curve(5, 1, 0, 0, 0, 1, 0);
    TorsionLattice T2 = torsion_basis(E2, 2, 1, kB);
    CHECK(T2.ext_degree == 1);
    CHECK(T2.frob == modmat::M2::identity());

    // l = p rejected
    CHECK_THROWS_AS(torsion_basis(E, 5, 1, kB), Error);

    // det/trace congruences at higher levels
    for (auto [l, e] : std::vector<std::pair<i64, int>>{{2, 2}, {3, 1}, {3, 2}}) {
        TorsionLattice Tl = torsion_basis(E, l, e, kB);
        i64 L = Tl.mod;
        CHECK(modmat::trace(Tl.frob, L) == modmat::mod(-3, L));
        CHECK(modmat::det(Tl.frob, L) == modmat::mod(5, L));
        // basis points have exact order l^e
        CHECK(point_mul(Tl.curve, L, Tl.b1).inf);
        CHECK(!point_mul(Tl.curve, L / l, Tl.b1).inf);
        CHECK(point_mul(Tl.curve, L, Tl.b2).inf);
        // coordinates round-trip
        auto [a, b] = torsion_coordinates(Tl, point_add(Tl.curve, Tl.b1, Tl.b2));
        CHECK(a == 1);
        CHECK(b == 1);
    }
}

TEST_CASE("torsion basis minimal extension degree is verified") {
    // char-2 curve: y^2 + y = x^3 over F_2 has t = 0 (supersingular);
    // frobenius satisfies pi^2 = -2, so E[3] appears where 3 | N_m.
    EllipticCurve E = make_curve(2, 1, 0, 0, 1, 0, 0);
    TorsionLattice T = torsion_basis(E, 3, 1, kB);
    // N_1 = 3 but full E[3] needs 9 | N_m and 3 | 2^m - 1
    for (int m = 1; m < T.ext_degree; m++) {
        i64 N = count_ext(0, 2, m);
        i64 qm = 1;
        for (int i = 0; i < m; i++) qm *= 2;
        bool necessary = (N % 9 == 0) && ((qm - 1) % 3 == 0);
        CHECK(!necessary); // no smaller field can work
    }
    CHECK(modmat::det(T.frob, 3) == modmat::mod(2, 3));
}
