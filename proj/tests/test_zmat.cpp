#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "isopower/zmat.hpp"

using namespace isopower::zmat;

namespace {

Mat from_rows(std::initializer_list<std::initializer_list<long>> rows) {
    int r = static_cast<int>(rows.size());
    int c = r ? static_cast<int>(rows.begin()->size()) : 0;
    Mat m(r, c);
    int i = 0;
    for (auto& row : rows) {
        int j = 0;
        for (long v : row) m.at(i, j++) = v;
        i++;
    }
    return m;
}

// random unimodular row scrambling
Mat scramble_rows(Mat m, std::mt19937& rng, int steps) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> idx(0, m.rows - 1);
    for (int s = 0; s < steps; s++) {
        int i = idx(rng), j = idx(rng);
        if (i == j) continue;
        long c = coef(rng);
        for (int k = 0; k < m.cols; k++) m.at(i, k) += c * m.at(j, k);
    }
    return m;
}

} // namespace

TEST_CASE("hnf canonical form") {
    Mat m = from_rows({{2, 4}, {1, 3}});
    Mat h = hnf(m);
    CHECK(h == from_rows({{1, 1}, {0, 2}}));
}

TEST_CASE("hnf invariant under unimodular row operations") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> val(-9, 9);
    for (int trial = 0; trial < 200; trial++) {
        Mat m(4, 4);
        for (auto& v : m.a) v = val(rng);
        Mat h1 = hnf(m);
        Mat h2 = hnf(scramble_rows(m, rng, 12));
        CHECK(h1 == h2);
    }
}

TEST_CASE("snf divisibility chain and determinant") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> val(-6, 6);
    for (int trial = 0; trial < 200; trial++) {
        Mat m(3, 3);
        for (auto& v : m.a) v = val(rng);
        Mat U, V;
        Mat s = snf(m, &U, &V);
        for (int i = 0; i + 1 < 3; i++) {
            if (s.at(i, i) != 0 && s.at(i + 1, i + 1) != 0)
                CHECK(s.at(i + 1, i + 1) % s.at(i, i) == 0);
        }
        CHECK(mul(mul(U, m), V) == s);
        Z dm = det(m);
        Z ds = s.at(0, 0) * s.at(1, 1) * s.at(2, 2);
        Z abs_dm;
        mpz_abs(abs_dm.get_mpz_t(), dm.get_mpz_t());
        CHECK(abs_dm == ds);
    }
}

TEST_CASE("preimage lattice") {
    // {y : C y = 0 mod 4} for C = [[2,0],[0,1]]
    Mat C = from_rows({{2, 0}, {0, 1}});
    Mat L = preimage_lattice(C, Z(4));
    CHECK(L == from_rows({{2, 0}, {0, 4}}));

    // brute check on random instances
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> val(-4, 4);
    for (int trial = 0; trial < 50; trial++) {
        Mat C2(3, 2);
        for (auto& v : C2.a) v = val(rng);
        Mat L2 = preimage_lattice(C2, Z(6));
        for (long y0 = -6; y0 <= 6; y0++)
            for (long y1 = -6; y1 <= 6; y1++) {
                bool ok = true;
                for (int i = 0; i < 3; i++) {
                    Z s = C2.at(i, 0) * y0 + C2.at(i, 1) * y1;
                    if (s % 6 != 0) ok = false;
                }
                Mat Y(1, 2);
                Y.at(0, 0) = y0;
                Y.at(0, 1) = y1;
                Mat X;
                bool inlat = express_in_basis(Y, L2, X);
                CHECK(ok == inlat);
            }
    }
}

TEST_CASE("express_in_basis round trip") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> val(-5, 5);
    for (int trial = 0; trial < 100; trial++) {
        Mat B(3, 3);
        for (auto& v : B.a) v = val(rng);
        if (det(B) == 0) continue;
        Mat X0(2, 3);
        for (auto& v : X0.a) v = val(rng);
        Mat A = mul(X0, B);
        Mat X;
        REQUIRE(express_in_basis(A, B, X));
        CHECK(mul(X, B) == A);
    }
}

TEST_CASE("quotient structure") {
    // Z^2 / <(2,0),(0,6)> = Z/2 x Z/6
    Mat S = from_rows({{2, 0}, {0, 6}});
    auto q = quotient_structure(S);
    REQUIRE(q.size() == 2);
    CHECK(q[0] == 2);
    CHECK(q[1] == 6);
    CHECK(quotient_structure(Mat::identity(4)).empty());
}
