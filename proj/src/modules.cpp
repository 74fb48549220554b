#include "isopower/modules.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace isopower::modules {

using orders::kconj;
using orders::kmul;

namespace {

Z zgcd(const Z& a, const Z& b) {
    Z g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

Z zlcm(const Z& a, const Z& b) {
    Z g;
    mpz_lcm(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

// column-action matrix of multiplication by g on (x, y) coordinates
Mat mul_matrix2(const KElem& g, i64 dK) {
    Z n0 = (Z(dK) * dK - dK) / 4;
    Mat m(2, 2);
    m.at(0, 0) = g.x;
    m.at(0, 1) = -g.y * n0;
    m.at(1, 0) = g.y;
    m.at(1, 1) = g.x + g.y * dK;
    return m;
}

// block-diagonal matrix acting on row-coordinate vectors from the right
Mat row_action_blocks(const KElem& g, i64 dK, int n) {
    Mat blk = zmat::transpose(mul_matrix2(g, dK));
    Mat out(2 * n, 2 * n);
    for (int j = 0; j < n; j++)
        for (int r = 0; r < 2; r++)
            for (int c = 0; c < 2; c++) out.at(2 * j + r, 2 * j + c) = blk.at(r, c);
    return out;
}

RModule normalize_module(const QuadOrder& R, int rank, Z den, Mat rows) {
    Mat h = zmat::hnf(std::move(rows));
    if (h.rows != 2 * rank)
        fail(ErrorKind::DegenerateLattice, "module lattice is not full rank");
    if (den < 0) den = -den;
    Z g = den;
    for (const Z& v : h.a) g = zgcd(g, v);
    if (g > 1) {
        den /= g;
        for (Z& v : h.a) v /= g;
    }
    RModule M;
    M.base = R;
    M.rank = rank;
    M.den = den;
    M.lat = std::move(h);
    Mat act = zmat::mul(M.lat, row_action_blocks(KElem{0, R.f}, R.dK, rank));
    Mat W;
    if (!zmat::express_in_basis(act, M.lat, W))
        fail(ErrorKind::DegenerateLattice, "lattice is not stable under the order action");
    return M;
}

} // namespace

RModule module_from_ideals(const QuadOrder& R, const std::vector<QuadIdeal>& ideals) {
    if (ideals.empty()) fail(ErrorKind::UsageError, "need at least one ideal summand");
    int n = static_cast<int>(ideals.size());
    Z den = 1;
    for (const auto& I : ideals) {
        if (I.owner.dK != R.dK || R.f % I.owner.f != 0)
            fail(ErrorKind::OwnerNotAbove, "summand owner does not contain the base order");
        den = zlcm(den, I.zbasis.den);
    }
    Mat rows(2 * n, 2 * n);
    for (int j = 0; j < n; j++) {
        Z scale = den / ideals[j].zbasis.den;
        for (int r = 0; r < 2; r++)
            for (int c = 0; c < 2; c++)
                rows.at(2 * j + r, 2 * j + c) = ideals[j].zbasis.basis.at(r, c) * scale;
    }
    return normalize_module(R, n, den, std::move(rows));
}

RModule module_from_presentation(const QuadOrder& R, int m, int n,
                                 const std::vector<KElem>& X) {
    if (n < 1 || m < 0 || static_cast<int>(X.size()) != m * n)
        fail(ErrorKind::UsageError, "presentation matrix shape mismatch");
    i64 f = R.f, dK = R.dK;
    Z n0 = (Z(dK) * dK - dK) / 4;
    auto to_r = [&](const KElem& e) -> std::pair<Z, Z> {
        if (e.y % f != 0)
            fail(ErrorKind::UsageError, "presentation entry is not in the base order");
        return {e.x, e.y / f};
    };
    // Image lattice of the relation map in R-basis coordinates
    // (u, v) <-> u + v f w per slot: rows v X and (f w) v X.
    Mat L(2 * m, 2 * n);
    for (int i = 0; i < m; i++)
        for (int j = 0; j < n; j++) {
            auto [u, v] = to_r(X[static_cast<size_t>(i) * n + j]);
            L.at(2 * i, 2 * j) = u;
            L.at(2 * i, 2 * j + 1) = v;
            // (u + v f w) f w = -v f^2 n0 + (u + v f dK)(f w)
            L.at(2 * i + 1, 2 * j) = -v * f * f * n0;
            L.at(2 * i + 1, 2 * j + 1) = u + v * f * dK;
        }
    Mat sat = zmat::row_saturation(L);
    Mat Lh = zmat::hnf(L);
    if (!(sat == Lh)) {
        Mat Xq;
        bool ok = zmat::express_in_basis(Lh, sat, Xq);
        assert(ok);
        (void)ok;
        auto invf = zmat::quotient_structure(Xq);
        std::string exp = invf.empty() ? "?" : invf.back().get_str();
        fail(ErrorKind::HasTorsion, "cokernel has torsion of exponent " + exp);
    }
    int k = sat.rows;
    assert(k % 2 == 0);
    int r2 = 2 * n - k;
    int rnk = r2 / 2;
    if (rnk == 0) fail(ErrorKind::UsageError, "cokernel is the zero module");
    // Unimodular coordinates isolating the quotient Z^{2n}/sat = Z^{r2}.
    Mat W_q(r2, r2);
    {
        Mat V;
        if (k > 0) {
            Mat U;
            Mat S = zmat::snf(sat, &U, &V);
            for (int i = 0; i < k; i++) assert(S.at(i, i) == 1); // saturated
        } else {
            V = Mat::identity(2 * n);
        }
        Mat Vinv = zmat::inverse_unimodular(V);
        Mat xi(r2, 2 * n); // preimages of the quotient basis
        for (int i = 0; i < r2; i++)
            for (int j = 0; j < 2 * n; j++) xi.at(i, j) = Vinv.at(k + i, j);
        Mat AR(2 * n, 2 * n); // row action of f w in R-basis coordinates
        for (int j = 0; j < n; j++) {
            AR.at(2 * j, 2 * j + 1) = 1;
            AR.at(2 * j + 1, 2 * j) = -Z(f) * f * n0;
            AR.at(2 * j + 1, 2 * j + 1) = Z(f) * dK;
        }
        Mat movedV = zmat::mul(zmat::mul(xi, AR), V);
        for (int i = 0; i < r2; i++)
            for (int j = 0; j < r2; j++) W_q.at(i, j) = movedV.at(i, k + j);
    }
    // Greedy K(omega)-basis of the quotient: coordinate rows x act by x W_q.
    Mat B(0, r2);
    for (int j = 0; j < r2 && B.rows < r2; j++) {
        Mat cand(B.rows + 2, r2);
        std::copy(B.a.begin(), B.a.end(), cand.a.begin());
        cand.at(B.rows, j) = 1;
        for (int c = 0; c < r2; c++) cand.at(B.rows + 1, c) = W_q.at(j, c);
        if (zmat::rank(cand) == cand.rows) B = std::move(cand);
    }
    if (B.rows != r2)
        fail(ErrorKind::DegenerateLattice, "no free K-basis found for the quotient");
    Z detB;
    Mat adjB = zmat::adjugate(B, detB);
    // Row t of adj(B)/detB gives e_t in the (u_i, f w u_i) basis; fold the f
    // into the global (1, w_K) coordinates.
    Mat rows(r2, r2);
    for (int t = 0; t < r2; t++)
        for (int i = 0; i < rnk; i++) {
            rows.at(t, 2 * i) = adjB.at(t, 2 * i);
            rows.at(t, 2 * i + 1) = adjB.at(t, 2 * i + 1) * f;
        }
    if (detB < 0) {
        detB = -detB;
        for (Z& v : rows.a) v = -v;
    }
    return normalize_module(R, rnk, detB, std::move(rows));
}

RModule module_from_nf(const QuadOrder& R, const ModuleNF& nf) {
    int n = static_cast<int>(nf.conductors.size());
    if (n < 1) fail(ErrorKind::UsageError, "empty conductor chain");
    std::vector<QuadIdeal> ideals;
    for (int i = 0; i < n; i++) {
        i64 g = nf.conductors[i];
        if (g < 1 || R.f % g != 0)
            fail(ErrorKind::OwnerNotAbove, "conductor does not divide f");
        if (i + 1 < n && nf.conductors[i] % nf.conductors[i + 1] != 0)
            fail(ErrorKind::UsageError, "conductors do not form a divisibility chain");
        QuadOrder Rg{g * g * R.dK, R.dK, g};
        if (i == n - 1)
            ideals.push_back(orders::ideal_from_form(Rg, nf.steinitz));
        else
            ideals.push_back(orders::ideal_from_form(Rg, orders::principal_form(Rg)));
    }
    return module_from_ideals(R, ideals);
}

Mat omega_action(const RModule& M) {
    Mat act = zmat::mul(M.lat, row_action_blocks(KElem{0, M.base.f}, M.base.dK, M.rank));
    Mat W;
    bool ok = zmat::express_in_basis(act, M.lat, W);
    assert(ok);
    (void)ok;
    return W;
}

namespace {

KElem kdet(const std::vector<KElem>& m, int n, i64 dK) {
    if (n == 1) return m[0];
    KElem acc{0, 0};
    std::vector<KElem> sub(static_cast<size_t>(n - 1) * (n - 1));
    for (int j = 0; j < n; j++) {
        for (int r = 1; r < n; r++) {
            int cc = 0;
            for (int c = 0; c < n; c++) {
                if (c == j) continue;
                sub[static_cast<size_t>(r - 1) * (n - 1) + cc] = m[static_cast<size_t>(r) * n + c];
                cc++;
            }
        }
        KElem term = kmul(m[j], kdet(sub, n - 1, dK), dK);
        if (j % 2 == 0) {
            acc.x += term.x;
            acc.y += term.y;
        } else {
            acc.x -= term.x;
            acc.y -= term.y;
        }
    }
    return acc;
}

} // namespace

ModuleNF normal_form(const RModule& M) {
    const QuadOrder& R = M.base;
    int n = M.rank;
    // Conductor chain = invariant factors of (M O_K)/M, padded with 1s.
    Mat wrows = zmat::mul(M.lat, row_action_blocks(KElem{0, 1}, R.dK, n));
    Mat MOK = zmat::hnf(zmat::vstack(M.lat, wrows));
    Mat X;
    bool ok = zmat::express_in_basis(M.lat, MOK, X);
    assert(ok);
    (void)ok;
    std::vector<Z> invf = zmat::quotient_structure(X); // ascending
    if (static_cast<int>(invf.size()) > n)
        fail(ErrorKind::CrossCheckMismatch, "conductor chain longer than the rank");
    std::vector<i64> conductors(n, 1);
    for (size_t i = 0; i < invf.size(); i++) {
        if (!invf[i].fits_slong_p()) fail(ErrorKind::BoundExceeded, "conductor overflow");
        conductors[invf.size() - 1 - i] = invf[i].get_si(); // largest first
    }
    for (int i = 0; i < n; i++)
        if (R.f % conductors[i] != 0 ||
            (i + 1 < n && conductors[i] % conductors[i + 1] != 0))
            fail(ErrorKind::CrossCheckMismatch, "conductor chain is not a divisor chain");
    // Steinitz class: R_{f_n}-span of the n x n minors of the generator rows.
    i64 fn = conductors[n - 1];
    QuadOrder S{fn * fn * R.dK, R.dK, fn};
    std::vector<KElem> minors;
    std::vector<int> comb(n);
    for (int i = 0; i < n; i++) comb[i] = i;
    while (true) {
        std::vector<KElem> sq(static_cast<size_t>(n) * n);
        for (int r = 0; r < n; r++)
            for (int c = 0; c < n; c++)
                sq[static_cast<size_t>(r) * n + c] =
                    KElem{M.lat.at(comb[r], 2 * c), M.lat.at(comb[r], 2 * c + 1)};
        KElem d = kdet(sq, n, R.dK);
        if (!(d.x == 0 && d.y == 0)) minors.push_back(d);
        int i = n - 1;
        while (i >= 0 && comb[i] == n + i) i--;
        if (i < 0) break;
        comb[i]++;
        for (int j = i + 1; j < n; j++) comb[j] = comb[j - 1] + 1;
    }
    if (minors.empty()) fail(ErrorKind::DegenerateLattice, "all maximal minors vanish");
    Mat rows(2 * static_cast<int>(minors.size()), 2);
    for (size_t i = 0; i < minors.size(); i++) {
        rows.at(2 * i, 0) = minors[i].x;
        rows.at(2 * i, 1) = minors[i].y;
        KElem w = kmul(KElem{0, fn}, minors[i], R.dK);
        rows.at(2 * i + 1, 0) = w.x;
        rows.at(2 * i + 1, 1) = w.y;
    }
    Z denn = 1;
    for (int i = 0; i < n; i++) denn *= M.den;
    orders::KLat detlat = orders::klat_normalize(denn, std::move(rows));
    ModuleNF nf;
    nf.conductors = std::move(conductors);
    nf.steinitz = orders::reduce(orders::form_from_lattice(detlat, S));
    return nf;
}

bool is_isomorphic(const RModule& A, const RModule& B) {
    if (!(A.base == B.base)) fail(ErrorKind::BaseMismatch, "modules over different orders");
    if (A.rank != B.rank) return false;
    return normal_form(A) == normal_form(B);
}

RModule dual_module(const RModule& M) {
    const QuadOrder& R = M.base;
    int n = M.rank;
    i64 f = R.f, dK = R.dK;
    Z detL = zmat::det(M.lat);
    if (detL < 0) detL = -detL;
    Z T = M.den * detL;
    // y with sum_j y_j x_j in R for every generator x; then conjugate.
    Mat C(4 * n, 2 * n);
    for (int g = 0; g < 2 * n; g++) {
        for (int j = 0; j < n; j++) {
            Mat mj = mul_matrix2(KElem{M.lat.at(g, 2 * j), M.lat.at(g, 2 * j + 1)}, dK);
            for (int r = 0; r < 2; r++)
                for (int c = 0; c < 2; c++) C.at(2 * g + r, 2 * j + c) = mj.at(r, c);
        }
        // value must land in R = Z + Z f w: scale the integer row by f so the
        // two conditions share the modulus f * T * M.den.
        for (int c = 0; c < 2 * n; c++) C.at(2 * g, c) *= f;
    }
    Z D0 = Z(f) * T * M.den;
    Mat sol = zmat::preimage_lattice(C, D0);
    Mat conj(2 * n, 2 * n);
    for (int r = 0; r < 2 * n; r++)
        for (int j = 0; j < n; j++) {
            Z x = sol.at(r, 2 * j), y = sol.at(r, 2 * j + 1);
            conj.at(r, 2 * j) = x + y * dK;
            conj.at(r, 2 * j + 1) = -y;
        }
    return normalize_module(R, n, T, std::move(conj));
}

std::vector<ModuleNF> enumerate_modules(const QuadOrder& R, int n, const Bounds& bounds) {
    if (n < 1) fail(ErrorKind::UsageError, "rank must be >= 1");
    if (-R.D > bounds.discriminant)
        fail(ErrorKind::BoundExceeded, "discriminant above cap");
    std::vector<i64> divisors;
    for (i64 g = 1; g <= R.f; g++)
        if (R.f % g == 0) divisors.push_back(g);
    std::sort(divisors.rbegin(), divisors.rend());
    std::vector<std::vector<i64>> chains;
    std::vector<i64> cur;
    auto rec = [&](auto&& self, i64 top) -> void {
        if (static_cast<int>(cur.size()) == n) {
            chains.push_back(cur);
            return;
        }
        for (i64 g : divisors) {
            if (top % g != 0) continue;
            cur.push_back(g);
            self(self, g);
            cur.pop_back();
        }
    };
    rec(rec, R.f);
    std::vector<ModuleNF> out;
    for (const auto& chain : chains) {
        i64 fn = chain.back();
        QuadOrder S{fn * fn * R.dK, R.dK, fn};
        orders::ClassGroup G = orders::class_group(S, bounds);
        for (const QuadForm& q : G.reps) out.push_back(ModuleNF{chain, q});
    }
    return out;
}

std::pair<Mat, Z> hom_module_lattice(const RModule& A, const RModule& B) {
    if (!(A.base == B.base)) fail(ErrorKind::BaseMismatch, "modules over different orders");
    i64 dK = A.base.dK;
    int n = A.rank, np = B.rank;
    int vars = 2 * n * np; // K-entries phi_{ik}: coords at columns 2(i n + k), +1
    Z detB;
    Mat adjB = zmat::adjugate(B.lat, detB);
    Mat adjBT = zmat::transpose(adjB);
    Z T = B.den * A.den * detB;
    if (T < 0) T = -T;
    Mat C(2 * np * A.lat.rows, vars);
    for (int g = 0; g < A.lat.rows; g++) {
        Mat coordmap(2 * np, vars); // phi-vars -> coords(Phi g)
        for (int i = 0; i < np; i++)
            for (int k = 0; k < n; k++) {
                Mat mk = mul_matrix2(KElem{A.lat.at(g, 2 * k), A.lat.at(g, 2 * k + 1)}, dK);
                int base = 2 * (i * n + k);
                for (int r = 0; r < 2; r++)
                    for (int c = 0; c < 2; c++) coordmap.at(2 * i + r, base + c) = mk.at(r, c);
            }
        Mat block = zmat::mul(adjBT, coordmap);
        for (int r = 0; r < 2 * np; r++)
            for (int c = 0; c < vars; c++)
                C.at(g * 2 * np + r, c) = block.at(r, c) * B.den;
    }
    // Phi g in B <=> B.den adj(B)^t coords(Phi g) = 0 mod (T A.den detB)
    Z D0 = T * A.den * detB;
    if (D0 < 0) D0 = -D0;
    Mat sol = zmat::preimage_lattice(C, D0);
    return {sol, T};
}

bool maps_onto(const RModule& A, const RModule& B, const Mat& phi, const Z& phi_den) {
    i64 dK = A.base.dK;
    int n = A.rank, np = B.rank;
    Mat rows(A.lat.rows, 2 * np);
    for (int g = 0; g < A.lat.rows; g++)
        for (int i = 0; i < np; i++) {
            KElem acc{0, 0};
            for (int k = 0; k < n; k++) {
                KElem pik{phi.at(i, 2 * k), phi.at(i, 2 * k + 1)};
                KElem gk{A.lat.at(g, 2 * k), A.lat.at(g, 2 * k + 1)};
                KElem t = kmul(pik, gk, dK);
                acc.x += t.x;
                acc.y += t.y;
            }
            rows.at(g, 2 * i) = acc.x;
            rows.at(g, 2 * i + 1) = acc.y;
        }
    Mat h = zmat::hnf(std::move(rows));
    if (h.rows != 2 * np) return false;
    // (1/(A.den phi_den)) image = (1/B.den) B.lat ?
    Mat left = std::move(h);
    for (Z& v : left.a) v *= B.den;
    Mat right = B.lat;
    Z s = A.den * phi_den;
    for (Z& v : right.a) v *= s;
    return zmat::hnf(std::move(left)) == zmat::hnf(std::move(right));
}

} // namespace isopower::modules
