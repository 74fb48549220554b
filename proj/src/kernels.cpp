#include "isopower/kernels.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace isopower::kernels {

namespace {

constexpr i64 kSubgroupCap = 1 << 16;

i64 ipow(i64 b, int e) {
    i64 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// closure of a generating set inside (Z/L)^d
std::set<std::vector<i64>> close_subgroup(const std::vector<std::vector<i64>>& gens, i64 L,
                                          size_t d) {
    std::set<std::vector<i64>> S;
    S.insert(std::vector<i64>(d, 0));
    for (const auto& g : gens) {
        if (g.size() != d) fail(ErrorKind::UsageError, "generator has wrong length");
        std::vector<i64> gred(d);
        for (size_t i = 0; i < d; i++) gred[i] = modmat::mod(g[i], L);
        if (S.count(gred)) continue;
        std::vector<std::vector<i64>> mults;
        std::vector<i64> acc(d, 0);
        do {
            mults.push_back(acc);
            for (size_t i = 0; i < d; i++) acc[i] = (acc[i] + gred[i]) % L;
        } while (std::any_of(acc.begin(), acc.end(), [](i64 v) { return v != 0; }));
        std::set<std::vector<i64>> out;
        for (const auto& s : S)
            for (const auto& mq : mults) {
                std::vector<i64> t(d);
                for (size_t i = 0; i < d; i++) t[i] = (s[i] + mq[i]) % L;
                out.insert(std::move(t));
                if (static_cast<i64>(out.size()) > kSubgroupCap)
                    fail(ErrorKind::BoundExceeded, "subgroup too large to enumerate");
            }
        S = std::move(out);
    }
    return S;
}

std::vector<i64> apply_blocks(const M2& op, const std::vector<i64>& v, i64 L) {
    size_t r = v.size() / 2;
    std::vector<i64> out(v.size());
    for (size_t j = 0; j < r; j++) {
        out[2 * j] = modmat::mod(op.a * v[2 * j] + op.b * v[2 * j + 1], L);
        out[2 * j + 1] = modmat::mod(op.c * v[2 * j] + op.d * v[2 * j + 1], L);
    }
    return out;
}

std::vector<std::vector<i64>> all_elements(i64 L, int d, i64 cap) {
    i64 size = 1;
    for (int i = 0; i < d; i++) {
        size *= L;
        if (size > cap) fail(ErrorKind::BoundExceeded, "torsion power too large for enumeration");
    }
    std::vector<std::vector<i64>> all;
    std::vector<i64> v(d, 0);
    while (true) {
        all.push_back(v);
        int pos = 0;
        while (pos < d && v[pos] == L - 1) v[pos++] = 0;
        if (pos == d) break;
        v[pos]++;
    }
    return all;
}

// matrices representing (End E)/l^e acting on E[l^e]
std::vector<M2> end_ring_matrices(const EllipticCurve& E, const CurveOrderData& cd, i64 l,
                                  int e, const Bounds& bounds) {
    i64 L = ipow(l, e);
    std::vector<M2> ring;
    if (cd.rank4) {
        // End tensor Z_l is the full matrix algebra (Tate), so every matrix occurs
        for (i64 a = 0; a < L; a++)
            for (i64 b = 0; b < L; b++)
                for (i64 c = 0; c < L; c++)
                    for (i64 d2 = 0; d2 < L; d2++) ring.push_back(M2{a, b, c, d2});
        return ring;
    }
    M2 omega;
    try {
        omega = functor::omega_matrix(E, cd, cd.fE, l, e, bounds, /*strict=*/false);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::BoundExceeded)
            fail(ErrorKind::DenominatorClash,
                 "End-ring action not realizable on this torsion level: " + err.message());
        throw;
    }
    for (i64 a = 0; a < L; a++)
        for (i64 b = 0; b < L; b++)
            ring.push_back(modmat::add(M2::scalar(a, L), modmat::smul(b, omega, L), L));
    return ring;
}

} // namespace

Commutant commutant(const EllipticCurve& E, i64 l, int e, const Bounds& bounds) {
    if (l == E.field->p) fail(ErrorKind::BadPrime, "l equals the characteristic");
    CurveOrderData cd = functor::curve_order_data(E, bounds);
    Commutant C;
    C.l = l;
    C.e = e;
    C.mod = ipow(l, e);
    if (cd.rank4) {
        C.shape = Commutant::Shape::ZlCenter;
        C.basis = {M2::identity()};
        return C;
    }
    C.shape = Commutant::Shape::Rank2;
    M2 omega;
    try {
        omega = functor::omega_matrix(E, cd, cd.fE, l, e, bounds, /*strict=*/false);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::BoundExceeded)
            fail(ErrorKind::DenominatorClash,
                 "End-ring action not realizable on this torsion level: " + err.message());
        throw;
    }
    // saturated image: the End generator is never scalar mod l
    if (modmat::is_scalar(omega, l))
        fail(ErrorKind::CrossCheckMismatch, "End generator scalar mod l; saturation bug");
    C.basis = {M2::identity(), omega};
    arith::TorsionLattice T = arith::torsion_basis(E, l, e, bounds);
    for (const M2& b : C.basis)
        if (!(modmat::mul(b, T.frob, C.mod) == modmat::mul(T.frob, b, C.mod)))
            fail(ErrorKind::CrossCheckMismatch,
                 "commutant basis does not commute with Frobenius");
    return C;
}

std::set<std::vector<i64>> subgroup_elements(const SubgroupData& G) {
    i64 L = ipow(G.l, G.e);
    return close_subgroup(G.generators, L, static_cast<size_t>(2 * G.r));
}

bool is_kernel_subgroup(const EllipticCurve& E, const SubgroupData& G, const Bounds& bounds) {
    if (G.l == E.field->p) fail(ErrorKind::BadPrime, "l equals the characteristic");
    i64 L = ipow(G.l, G.e);
    auto S = subgroup_elements(G);
    arith::TorsionLattice T = arith::torsion_basis(E, G.l, G.e, bounds);
    for (const auto& g : S)
        if (!S.count(apply_blocks(T.frob, g, L)))
            fail(ErrorKind::NotGaloisStable, "subgroup is not Frobenius-stable");
    Commutant C = commutant(E, G.l, G.e, bounds);
    for (const M2& c : C.basis)
        for (const auto& g : S)
            if (!S.count(apply_blocks(c, g, L))) return false;
    return true;
}

SubgroupSet brute_force_kernels(const EllipticCurve& E, i64 l, int e, int r, int s_max,
                                const Bounds& bounds) {
    if (l == E.field->p) fail(ErrorKind::BadPrime, "l equals the characteristic");
    if (r < 1 || s_max < 0) fail(ErrorKind::UsageError, "bad shape parameters");
    i64 L = ipow(l, e);
    CurveOrderData cd = functor::curve_order_data(E, bounds);
    std::vector<M2> ring = end_ring_matrices(E, cd, l, e, bounds);
    std::vector<std::vector<i64>> all = all_elements(L, 2 * r, kSubgroupCap);
    // kernels of single rows (s = 1)
    SubgroupSet singles;
    {
        std::vector<size_t> idx(static_cast<size_t>(r), 0);
        while (true) {
            std::set<std::vector<i64>> ker;
            for (const auto& v : all) {
                i64 s0 = 0, s1 = 0;
                for (int j = 0; j < r; j++) {
                    const M2& mj = ring[idx[j]];
                    s0 += mj.a * v[2 * j] + mj.b * v[2 * j + 1];
                    s1 += mj.c * v[2 * j] + mj.d * v[2 * j + 1];
                }
                if (modmat::mod(s0, L) == 0 && modmat::mod(s1, L) == 0) ker.insert(v);
            }
            singles.insert(std::move(ker));
            size_t pos = 0;
            while (pos < idx.size() && idx[pos] == ring.size() - 1) idx[pos++] = 0;
            if (pos == idx.size()) break;
            idx[pos]++;
        }
    }
    SubgroupSet out;
    out.insert(std::set<std::vector<i64>>(all.begin(), all.end())); // s = 0
    SubgroupSet frontier = out;
    if (s_max >= 1) {
        for (const auto& k : singles) out.insert(k);
        frontier = out;
    }
    for (int s = 2; s <= s_max; s++) {
        SubgroupSet next;
        for (const auto& A : frontier)
            for (const auto& B : singles) {
                std::set<std::vector<i64>> inter;
                std::set_intersection(A.begin(), A.end(), B.begin(), B.end(),
                                      std::inserter(inter, inter.begin()));
                if (!out.count(inter)) next.insert(inter);
            }
        if (next.empty()) break;
        for (const auto& k : next) out.insert(k);
        frontier = std::move(next);
    }
    return out;
}

SubgroupSet frobenius_stable_subgroups(const EllipticCurve& E, i64 l, int e, int r,
                                       const Bounds& bounds) {
    i64 L = ipow(l, e);
    arith::TorsionLattice T = arith::torsion_basis(E, l, e, bounds);
    std::vector<std::vector<i64>> all = all_elements(L, 2 * r, kSubgroupCap);
    SubgroupSet seen;
    std::set<std::vector<i64>> trivial;
    trivial.insert(std::vector<i64>(static_cast<size_t>(2 * r), 0));
    seen.insert(trivial);
    std::vector<std::set<std::vector<i64>>> frontier = {trivial};
    while (!frontier.empty()) {
        std::vector<std::set<std::vector<i64>>> next;
        for (const auto& S : frontier)
            for (const auto& v : all) {
                if (S.count(v)) continue;
                std::vector<std::vector<i64>> gens(S.begin(), S.end());
                gens.push_back(v);
                auto bigger = close_subgroup(gens, L, static_cast<size_t>(2 * r));
                if (seen.insert(bigger).second) next.push_back(bigger);
            }
        frontier = std::move(next);
    }
    SubgroupSet stable;
    for (const auto& S : seen) {
        bool ok = true;
        for (const auto& v : S)
            if (!S.count(apply_blocks(T.frob, v, L))) {
                ok = false;
                break;
            }
        if (ok) stable.insert(S);
    }
    return stable;
}

GaloisImageReport galois_image_test(const std::vector<M2>& mats, const std::vector<M2>& c_basis,
                                    i64 l) {
    GaloisImageReport rep;
    for (const M2& m : mats)
        if (modmat::det(m, l) == 0)
            fail(ErrorKind::SingularMatrix, "Galois image generator is singular mod l");
    auto vec_of = [&](const M2& m) {
        return std::array<i64, 4>{modmat::mod(m.a, l), modmat::mod(m.b, l),
                                  modmat::mod(m.c, l), modmat::mod(m.d, l)};
    };
    std::vector<std::array<i64, 4>> basis;
    auto reduce_vec = [&](std::array<i64, 4> v) {
        for (const auto& b : basis) {
            int piv = 0;
            while (piv < 4 && b[piv] == 0) piv++;
            if (piv == 4 || v[piv] == 0) continue;
            i64 c = modmat::mod(v[piv] * *modmat::inv_mod(b[piv], l), l);
            for (int i = 0; i < 4; i++) v[i] = modmat::mod(v[i] - c * b[i], l);
        }
        return v;
    };
    auto insert_vec = [&](const std::array<i64, 4>& raw) -> bool {
        auto v = reduce_vec(raw);
        if (std::all_of(v.begin(), v.end(), [](i64 x) { return x == 0; })) return false;
        basis.push_back(v);
        std::sort(basis.begin(), basis.end(), [](const auto& a, const auto& b2) {
            int pa = 0, pb = 0;
            while (pa < 4 && a[pa] == 0) pa++;
            while (pb < 4 && b2[pb] == 0) pb++;
            return pa < pb;
        });
        return true;
    };
    std::vector<M2> algebra;
    insert_vec(vec_of(M2::identity()));
    algebra.push_back(M2::identity());
    std::vector<M2> queue = mats;
    while (!queue.empty()) {
        M2 m = queue.back();
        queue.pop_back();
        if (!insert_vec(vec_of(m))) continue;
        algebra.push_back(m);
        for (const M2& a : algebra) {
            queue.push_back(modmat::mul(a, m, l));
            queue.push_back(modmat::mul(m, a, l));
        }
    }
    rep.algebra_dim = static_cast<int>(basis.size());
    {
        std::vector<std::array<i64, 4>> algebra_basis = basis;
        basis.clear();
        for (const M2& c : c_basis) insert_vec(vec_of(c));
        rep.commutant_dim = static_cast<int>(basis.size());
        basis = algebra_basis;
        rep.surjective = true;
        for (const M2& c : c_basis) {
            auto v = reduce_vec(vec_of(c));
            if (!std::all_of(v.begin(), v.end(), [](i64 x) { return x == 0; }))
                rep.surjective = false;
        }
    }
    if (rep.surjective) return rep;
    if (rep.commutant_dim < 4) {
        rep.obstruction = GaloisImageReport::Obstruction::ProperSubalgebra;
        return rep;
    }
    // C = M_2(F_l): Borel (common eigenline) or nonsplit Cartan
    for (i64 x = 0; x <= l; x++) {
        i64 v0 = (x == l) ? 0 : 1;
        i64 v1 = (x == l) ? 1 : x;
        bool common = true;
        for (const M2& m : mats) {
            i64 w0 = modmat::mod(m.a * v0 + m.b * v1, l);
            i64 w1 = modmat::mod(m.c * v0 + m.d * v1, l);
            if (modmat::mod(w0 * v1 - w1 * v0, l) != 0) {
                common = false;
                break;
            }
        }
        if (common) {
            rep.obstruction = GaloisImageReport::Obstruction::Borel;
            return rep;
        }
    }
    rep.obstruction = GaloisImageReport::Obstruction::NonsplitCartan;
    return rep;
}

} // namespace isopower::kernels
