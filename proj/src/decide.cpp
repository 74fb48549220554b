#include "isopower/decide.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <set>

#include "isopower/modules.hpp"

namespace isopower::decide {

using kernels::Commutant;
using kernels::SubgroupData;
using modmat::M2;

const char* case_tag_name(CaseTag t) {
    switch (t) {
        case CaseTag::OrdinaryZpiEqR: return "ordinary-Zpi=R";
        case CaseTag::SsFpZpiEqR: return "ss-Fp-Zpi=R";
        case CaseTag::SsFp2Rank4: return "ss-Fp2-rank4";
        case CaseTag::None: return "none";
    }
    return "none";
}

EndConductor end_conductor(const EllipticCurve& E, const Bounds& bounds) {
    CurveOrderData cd = functor::curve_order_data(E, bounds);
    EndConductor out;
    if (cd.rank4) {
        out.rank4 = true;
        return out;
    }
    out.f0 = cd.f0;
    out.fE = cd.fE;
    out.p_part_from_theory = cd.fE_p_part_from_theory;
    if (cd.supersingular && E.field->m >= 3) out.unsupported_case = true;
    return out;
}

namespace {

std::string curve_id_of(const EllipticCurve& E) {
    std::string s = std::to_string(E.field->p) + " " + std::to_string(E.field->m);
    for (int i = 0; i < 5; i++) s += " " + std::to_string(E.a[i]);
    return s;
}

// Evidence at a prime l | f0 (l != p): scalar levels, Prop 6.7 cross-check,
// and an explicit non-kernel witness when the prime obstructs.
PrimeEvidence prime_evidence(const EllipticCurve& E, const CurveOrderData& cd, i64 l,
                             int v_f0, const Bounds& bounds) {
    PrimeEvidence ev;
    ev.l = l;
    ev.v_f0 = v_f0;
    int v = 0;
    while (v < v_f0) {
        arith::TorsionLattice T = arith::torsion_basis(E, l, v + 1, bounds);
        if (!modmat::is_scalar(T.frob, T.mod)) break;
        v++;
    }
    ev.scalar_level = v;
    ev.v_fE = v_f0 - v;
    // Galois-image route: the Frobenius generates the image; surjectivity
    // onto C/lC is equivalent to the scalar test at level 1.
    try {
        Commutant C = kernels::commutant(E, l, 1, bounds);
        arith::TorsionLattice T1 = arith::torsion_basis(E, l, 1, bounds);
        auto rep = kernels::galois_image_test({T1.frob}, C.basis, l);
        ev.galois_checked = true;
        ev.galois_route_agrees = (rep.surjective == (ev.scalar_level == 0));
    } catch (const Error&) {
        ev.galois_checked = false;
    }
    if (ev.scalar_level > 0) {
        // pi is scalar on E[l], so every line is Galois-stable; the End
        // generator is not scalar, so some line fails the Prop 6.6 test.
        for (i64 x = 0; x <= l && !ev.has_witness; x++) {
            std::vector<i64> gen = {x == l ? 0 : 1, x == l ? 1 : x};
            SubgroupData G{l, 1, 1, {gen}};
            try {
                if (!kernels::is_kernel_subgroup(E, G, bounds)) {
                    ev.has_witness = true;
                    ev.witness = G;
                }
            } catch (const Error&) {
                break;
            }
        }
    }
    return ev;
}

} // namespace

EquivalenceVerdict decide_equivalence(const EllipticCurve& E, const Bounds& bounds) {
    CurveOrderData cd = functor::curve_order_data(E, bounds);
    EquivalenceVerdict out;
    out.curve_id = curve_id_of(E);
    out.q = cd.q;
    out.p = cd.p;
    out.a = E.field->m;
    out.t = cd.t;
    out.supersingular = cd.supersingular;
    out.rank4 = cd.rank4;
    if (cd.rank4) {
        // t = +-2p over F_{p^2}: quaternionic End ring of rank 4
        out.case_tag = CaseTag::SsFp2Rank4;
        out.equivalence = true;
        out.note = "maximal or minimal curve over F_{p^2}; every subgroup scheme is a kernel";
        return out;
    }
    out.f0 = cd.f0;
    out.fE = cd.fE;
    for (auto [l, v] : arith::factorize(cd.f0)) {
        if (l == cd.p) continue;
        out.evidence.push_back(prime_evidence(E, cd, l, v, bounds));
    }
    if (!cd.supersingular) {
        if (cd.fE == cd.f0) {
            out.case_tag = CaseTag::OrdinaryZpiEqR;
            out.equivalence = true;
        } else {
            out.case_tag = CaseTag::None;
            out.equivalence = false;
            out.note = "ordinary with Z[pi] strictly smaller than End E";
        }
        return out;
    }
    // supersingular, rank-2 End
    if (out.a == 1) {
        if (cd.fE == cd.f0) {
            out.case_tag = CaseTag::SsFpZpiEqR;
            out.equivalence = true;
        } else {
            out.case_tag = CaseTag::None;
            out.equivalence = false;
            out.note = "supersingular over F_p with Z[pi] strictly smaller than End E";
        }
        return out;
    }
    out.case_tag = CaseTag::None;
    out.equivalence = false;
    if (out.a == 2) {
        out.note = "supersingular over F_{p^2} with rank-2 End ring: a p-power "
                   "subgroup scheme obstruction (no prime-to-p computation applies)";
    } else {
        out.unsupported_case = true;
        out.note = "supersingular over a field larger than F_{p^2}: never an "
                   "equivalence; p-power obstruction";
    }
    return out;
}

ImageReport describe_image(const EllipticCurve& E, int max_rank, const Bounds& bounds) {
    CurveOrderData cd = functor::curve_order_data(E, bounds);
    if (cd.rank4)
        fail(ErrorKind::UnsupportedCase,
             "image description applies to rank-2 endomorphism rings");
    if (max_rank < 1 || max_rank > bounds.module_rank)
        fail(ErrorKind::BoundExceeded, "rank outside the configured bound");
    ImageReport rep;
    rep.disc_end = cd.fE * cd.fE * cd.dK;
    rep.disc_zpi = cd.f0 * cd.f0 * cd.dK;
    rep.equivalence = decide_equivalence(E, bounds).equivalence;
    orders::QuadOrder Rend{rep.disc_end, cd.dK, cd.fE};
    orders::QuadOrder Rzpi{rep.disc_zpi, cd.dK, cd.f0};
    for (int n = 1; n <= max_rank; n++) {
        ImageLine line;
        line.rank = n;
        line.image_classes = static_cast<i64>(modules::enumerate_modules(Rend, n, bounds).size());
        if (rep.equivalence)
            line.total_classes = line.image_classes;
        else if (n == 1)
            line.total_classes =
                static_cast<i64>(modules::enumerate_modules(Rzpi, 1, bounds).size());
        rep.lines.push_back(std::move(line));
    }
    return rep;
}

namespace {

arith::Code j_invariant(const EllipticCurve& E) {
    const arith::FiniteField& f = *E.field;
    auto I = [&](i64 v) { return f.from_int(v); };
    arith::Code a1 = E.a1(), a2 = E.a2(), a3 = E.a3(), a4 = E.a4(), a6 = E.a6();
    arith::Code b2 = f.add(f.mul(a1, a1), f.mul(I(4), a2));
    arith::Code b4 = f.add(f.mul(I(2), a4), f.mul(a1, a3));
    arith::Code c4 = f.sub(f.mul(b2, b2), f.mul(I(24), b4));
    return f.div(f.mul(c4, f.mul(c4, c4)), E.disc);
}

} // namespace

MaximalScanReport maximal_scan(i64 p, const Bounds& bounds, bool minimal, int gmax,
                               std::uint64_t seed, i64 sample_target) {
    if (!arith::is_prime(p)) fail(ErrorKind::NotPrime, "p must be prime");
    MaximalScanReport rep;
    rep.p = p;
    rep.minimal = minimal;
    i64 target_t = minimal ? 2 * p : -2 * p;
    rep.target_count = minimal ? (p - 1) * (p - 1) : (p + 1) * (p + 1);
    arith::Field F = arith::field_create(p, 2, bounds);
    i64 q = F->q;
    std::vector<std::array<arith::Code, 5>> tuples;
    i64 total = q * q * q * q * q;
    if (total <= 100000) { // p <= 3: exhaustive over all coefficient tuples
        rep.exhaustive = true;
        for (arith::Code a1 = 0; a1 < q; a1++)
            for (arith::Code a2 = 0; a2 < q; a2++)
                for (arith::Code a3 = 0; a3 < q; a3++)
                    for (arith::Code a4 = 0; a4 < q; a4++)
                        for (arith::Code a6 = 0; a6 < q; a6++)
                            tuples.push_back({a1, a2, a3, a4, a6});
    } else {
        rep.exhaustive = false;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<i64> pick(0, q - 1);
        for (i64 i = 0; i < sample_target; i++)
            tuples.push_back({pick(rng), pick(rng), pick(rng), pick(rng), pick(rng)});
        // deterministic boosters: base changes of F_p curves with p+1 points
        arith::Field Fp = arith::field_create(p, 1, bounds);
        arith::Embedding emb = arith::embed_field(Fp, F);
        for (arith::Code a1 = 0; a1 < p; a1++)
            for (arith::Code a2 = 0; a2 < p; a2++)
                for (arith::Code a3 = 0; a3 < p; a3++)
                    for (arith::Code a4 = 0; a4 < p; a4++)
                        for (arith::Code a6 = 0; a6 < p; a6++) {
                            try {
                                auto E0 = arith::curve_create(Fp, a1, a2, a3, a4, a6);
                                if (arith::count_points_naive(E0, bounds) != p + 1) continue;
                                tuples.push_back({emb.map(a1), emb.map(a2), emb.map(a3),
                                                  emb.map(a4), emb.map(a6)});
                            } catch (const Error&) {
                            }
                        }
    }
    std::map<arith::Code, MaximalClassReport> classes;
    for (const auto& t : tuples) {
        rep.curves_scanned++;
        EllipticCurve E;
        try {
            E = arith::curve_create(F, t[0], t[1], t[2], t[3], t[4]);
        } catch (const Error&) {
            continue;
        }
        i64 N = arith::count_points_naive(E, bounds);
        if (N != rep.target_count) continue;
        arith::Code j = j_invariant(E);
        if (classes.count(j)) continue;
        MaximalClassReport cls;
        cls.j = j;
        cls.coeffs = t;
        cls.count = N;
        cls.trace = q + 1 - N;
        arith::GroupStructure gs = arith::group_structure(E, 1, bounds);
        cls.d1 = gs.d1;
        cls.d2 = gs.d2;
        bool ok = (cls.trace == target_t);
        i64 expect_d = minimal ? p - 1 : p + 1;
        ok = ok && (cls.d1 == expect_d) && (cls.d2 == expect_d);
        for (i64 l : {2, 3, 5}) {
            if (l == p) continue;
            try {
                arith::TorsionLattice T = arith::torsion_basis(E, l, 1, bounds);
                i64 s;
                bool scalar = modmat::is_scalar(T.frob, l, &s);
                bool match = scalar && s == modmat::mod(minimal ? p : -p, l);
                ok = ok && match;
                cls.frob_scalar_l.push_back(l);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::BoundExceeded)
                    cls.skipped_l.push_back(l);
                else
                    throw;
            }
        }
        cls.conditions_ok = ok;
        classes.emplace(j, std::move(cls));
    }
    for (auto& [j, cls] : classes) rep.classes.push_back(cls);
    std::sort(rep.classes.begin(), rep.classes.end(),
              [](const MaximalClassReport& a, const MaximalClassReport& b) { return a.j < b.j; });
    // product varieties: counts multiply, so E_1 x ... x E_g has exactly
    // (p +- 1)^{2g} points and structure (Z/(p -+ 1))^{2g}
    rep.products_ok = !rep.classes.empty();
    for (int g = 1; g <= gmax; g++) {
        Z expect = 1;
        for (int i = 0; i < 2 * g; i++) expect *= (minimal ? p - 1 : p + 1);
        Z prod = 1;
        for (int i = 0; i < g; i++) {
            const MaximalClassReport& cls = rep.classes.empty()
                                                ? MaximalClassReport{}
                                                : rep.classes[i % rep.classes.size()];
            prod *= cls.count;
        }
        rep.product_counts.push_back(prod);
        if (prod != expect) rep.products_ok = false;
    }
    return rep;
}

} // namespace isopower::decide
