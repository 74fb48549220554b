#ifndef ISOPOWER_DECIDE_HPP
#define ISOPOWER_DECIDE_HPP

#include <optional>
#include <string>

#include "isopower/kernels.hpp"

namespace isopower::decide {

using arith::EllipticCurve;
using functor::CurveOrderData;
using zmat::Z;
using i64 = std::int64_t;

enum class CaseTag { OrdinaryZpiEqR, SsFpZpiEqR, SsFp2Rank4, None };

const char* case_tag_name(CaseTag t);

// Per-prime transcript of the scalar test, the Galois-image cross-check and,
// when the prime obstructs the equivalence, a concrete witness subgroup.
struct PrimeEvidence {
    i64 l = 0;
    int v_f0 = 0;         // v_l(f0)
    int scalar_level = 0; // max j with pi scalar on E[l^j]
    int v_fE = 0;         // v_l(fE)
    bool galois_checked = false;
    bool galois_route_agrees = false;
    bool has_witness = false;
    kernels::SubgroupData witness;
};

struct EndConductor {
    i64 f0 = 0;
    i64 fE = 0;
    bool rank4 = false;
    bool p_part_from_theory = false; // p | f0 handled by the taxonomy
    bool unsupported_case = false;   // supersingular rank 2 over F_{p^a}, a >= 3
};

EndConductor end_conductor(const EllipticCurve& E, const Bounds& bounds);

struct EquivalenceVerdict {
    std::string curve_id;
    i64 q = 0, p = 0;
    int a = 1; // q = p^a
    i64 t = 0;
    bool supersingular = false;
    bool rank4 = false;
    i64 f0 = 0, fE = 0;
    CaseTag case_tag = CaseTag::None;
    bool equivalence = false;
    bool unsupported_case = false;
    std::string note;
    std::vector<PrimeEvidence> evidence;
};

EquivalenceVerdict decide_equivalence(const EllipticCurve& E, const Bounds& bounds);

struct ImageLine {
    int rank = 0;
    Z image_classes = 0;           // classes in the image of the functor
    std::optional<Z> total_classes; // all classes isogenous to E^rank, when known
};

struct ImageReport {
    i64 disc_end = 0;
    i64 disc_zpi = 0;
    bool equivalence = false;
    std::vector<ImageLine> lines;
};

ImageReport describe_image(const EllipticCurve& E, int max_rank, const Bounds& bounds);

struct MaximalClassReport {
    arith::Code j = 0;                 // j-invariant (canonical class key)
    std::array<arith::Code, 5> coeffs; // a representative curve
    i64 count = 0;
    i64 trace = 0;
    i64 d1 = 0, d2 = 0;
    bool conditions_ok = false; // count, trace, structure, scalar Frobenius
    std::vector<i64> frob_scalar_l; // primes where Frobenius = -p (or +p) checked
    std::vector<i64> skipped_l;     // primes whose torsion field exceeded bounds
};

struct MaximalScanReport {
    i64 p = 0;
    bool minimal = false; // scan for (p-1)^2 instead of (p+1)^2
    bool exhaustive = false;
    i64 curves_scanned = 0;
    i64 target_count = 0; // (p +- 1)^2
    std::vector<MaximalClassReport> classes;
    std::vector<Z> product_counts; // g = 1..gmax: (p +- 1)^{2g}
    bool products_ok = false;
    // rank >= 2 projective modules over the quaternionic End are free, so all
    // higher-dimensional maximal varieties are isomorphic to E^g.
    bool high_rank_free = true;
};

MaximalScanReport maximal_scan(i64 p, const Bounds& bounds, bool minimal = false,
                               int gmax = 3, std::uint64_t seed = 1,
                               i64 sample_target = 200);

} // namespace isopower::decide

#endif
