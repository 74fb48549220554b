#ifndef ISOPOWER_ORDERS_HPP
#define ISOPOWER_ORDERS_HPP

#include <cstdint>
#include <vector>

#include "isopower/config.hpp"
#include "isopower/errors.hpp"
#include "isopower/zmat.hpp"

namespace isopower::orders {

using i64 = std::int64_t;
using zmat::Mat;
using zmat::Z;

// Imaginary quadratic order of discriminant D = f^2 * dK.
struct QuadOrder {
    i64 D = 0;  // discriminant, < 0
    i64 dK = 0; // fundamental discriminant
    i64 f = 1;  // conductor

    bool operator==(const QuadOrder&) const = default;
};

QuadOrder order_from_disc(i64 D);

// All orders R_g with g | f, sorted by descending conductor (R itself first).
std::vector<QuadOrder> suborder_chain_candidates(const QuadOrder& R);

// Primitive integral binary quadratic form a x^2 + b xy + c y^2.
struct QuadForm {
    i64 a = 1, b = 0, c = 0;

    i64 disc() const { return b * b - 4 * a * c; }
    bool operator==(const QuadForm&) const = default;
    auto operator<=>(const QuadForm&) const = default;
};

bool is_reduced(const QuadForm& q);
QuadForm reduce(QuadForm q);

// --- K = Q(sqrt(dK)) arithmetic in the basis (1, w), w = (dK + sqrt dK)/2 ---

struct KElem {
    Z x, y; // x + y*w
};

KElem kmul(const KElem& u, const KElem& v, i64 dK);
KElem kconj(const KElem& u, i64 dK);
Z knorm(const KElem& u, i64 dK);
Z ktrace(const KElem& u, i64 dK);

// Full-rank lattice (1/den) * rowspan(basis) in K, basis rows = (x, y) coords.
// Canonical form: basis in HNF (det > 0), gcd(den, content) = 1.
struct KLat {
    Z den = 1;
    Mat basis; // 2x2

    bool operator==(const KLat&) const = default;
};

KLat klat_normalize(Z den, Mat rows);
KLat klat_order(i64 dK, i64 g); // the order Z + Z g w
KLat klat_principal(const KElem& g, i64 dK);
KLat klat_mul(const KLat& a, const KLat& b, i64 dK);
KLat klat_scale(const KLat& a, const KElem& g, i64 dK);
// (L1 : L2) = {x in K : x L2 <= L1}
KLat colon_lattice(const KLat& L1, const KLat& L2, i64 dK);
// (L : L), returned as an order; DegenerateLattice if not one.
QuadOrder multiplier_ring(const KLat& L, i64 dK);
bool klat_contains(const KLat& L, const KElem& e, const Z& eden);
// relative norm N(L) = covol(L)/covol(R_f), as an exact rational num/den pair
std::pair<Z, Z> klat_norm(const KLat& L, i64 f);

// Invertible ideal of a quadratic order, carried both as a reduced-form class
// representative source and as an explicit Z-basis for lattice arithmetic.
struct QuadIdeal {
    QuadOrder owner;
    QuadForm form;
    KLat zbasis;
};

// Ideal a Z + ((-b + sqrt D)/2) Z attached to a primitive form.
QuadIdeal ideal_from_form(const QuadOrder& R, const QuadForm& q);
// Recover the form class of an invertible lattice over its owner order.
QuadForm form_from_lattice(const KLat& L, const QuadOrder& owner);
// Cross-check that the stored form and Z-basis describe the same class.
bool ideal_consistent(const QuadIdeal& I);

enum class IdealOp { Compose, Invert, Conjugate, Reduce };
QuadIdeal ideal_arith(const QuadIdeal& I, const QuadIdeal& J, IdealOp op);
QuadIdeal ideal_arith(const QuadIdeal& I, IdealOp op); // unary ops

struct ClassGroup {
    QuadOrder order;
    std::vector<QuadForm> reps;      // reduced primitive forms, sorted
    std::vector<i64> structure;      // elementary divisors d1 | d2 | ...

    i64 h() const { return static_cast<i64>(reps.size()); }
};

ClassGroup class_group(const QuadOrder& R, const Bounds& bounds = {});

// Composition-with-reduction on form classes (Gaussian composition realized
// through ideal multiplication).
QuadForm compose(const QuadOrder& R, const QuadForm& x, const QuadForm& y);
QuadForm form_pow(const QuadOrder& R, QuadForm x, i64 e);
QuadForm principal_form(const QuadOrder& R);

} // namespace isopower::orders

#endif
