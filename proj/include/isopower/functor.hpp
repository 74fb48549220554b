#ifndef ISOPOWER_FUNCTOR_HPP
#define ISOPOWER_FUNCTOR_HPP

#include <map>
#include <mutex>

#include "isopower/arith.hpp"
#include "isopower/modules.hpp"

namespace isopower::functor {

using arith::EllipticCurve;
using modules::ModuleNF;
using modules::RModule;
using orders::KElem;
using orders::QuadIdeal;
using orders::QuadOrder;
using zmat::Mat;
using zmat::Z;
using i64 = std::int64_t;

// Frobenius order data of a curve: pi = c0 + f0 w_K in K = Q(sqrt(dK)),
// Z[pi] has conductor f0, End E has conductor fE.
struct CurveOrderData {
    i64 q = 0, p = 0, t = 0;
    bool supersingular = false;
    bool rank4 = false; // t = +-2 sqrt(q): no imaginary quadratic invariants
    i64 disc0 = 0, dK = 0, f0 = 0, c0 = 0;
    i64 fE = 0;
    bool fE_p_part_from_theory = false; // p | f0 primes decided by the taxonomy
};

CurveOrderData curve_order_data(const EllipticCurve& E, const Bounds& bounds);

// Matrix of g*w_K on E[l^e]. Computed as (g/f0)(F - c0) with lift-and-divide
// at level e + v_l(denominator); `strict` instead rejects denominators
// divisible by l (the hom_torsion contract).
modmat::M2 omega_matrix(const EllipticCurve& E, const CurveOrderData& cd, i64 g, i64 l,
                        int e, const Bounds& bounds, bool strict);

// Galois-module description of A[l^e] for A = HOM_R(M, E).
struct TorsionRealization {
    i64 l = 0;
    int e = 0;
    i64 mod = 0;                 // l^e
    Z order = 1;                 // group order
    std::vector<Z> structure;    // invariant factors > 1, ascending
    bool frob_valid = false;     // structure homogeneous of exponent l^e
    Mat frob;                    // Frobenius on the generator basis, mod l^e
};

TorsionRealization hom_torsion(const RModule& M, const EllipticCurve& E, i64 l, int e,
                               const Bounds& bounds);

// Same realization computed from a presentation matrix X (m x n over R,
// entries in (1, w_K) coordinates): kernel of X acting on E[l^e]^n. Used for
// the non-saturated counterexample, where no torsion-free module exists.
TorsionRealization hom_torsion_presentation(const QuadOrder& R, int m, int n,
                                            const std::vector<KElem>& X,
                                            const EllipticCurve& E, i64 l, int e,
                                            const Bounds& bounds);

// #A(F_{q^m}) for A = HOM_R(M, E) by the functor-of-points route, with the
// characteristic-polynomial cross-check. CrossCheckMismatch on disagreement.
Z hom_point_count(const RModule& M, const EllipticCurve& E, int m, const Bounds& bounds);

// Point counts of ker(X : E^n -> E^m) over F_{q^mext}.
Z hom_count_presentation(const QuadOrder& R, int m, int n, const std::vector<KElem>& X,
                         const EllipticCurve& E, int mext, const Bounds& bounds);

struct KernelReport {
    Z norm = 1;             // #(R/I)
    Z prime_to_p_order = 1; // computed from torsion kernels
    int p_exponent = 0;     // inferred p-part exponent, not directly verified
    bool p_part_inferred = false;
    std::vector<std::pair<i64, Z>> local_orders; // (l, #E[I]_l)
};

KernelReport kernel_of_ideal(const EllipticCurve& E, const QuadIdeal& I,
                             const Bounds& bounds);

struct DualityReport {
    std::vector<Z> counts;      // #HOM(M, E)(F_{q^m}), m = 1..mmax
    std::vector<Z> dual_counts; // #HOM(M*, E)(F_{q^m})
    bool counts_equal = false;
    bool charpoly_equal = false;
    i64 charpoly_l = 0;
    int charpoly_e = 0;
};

DualityReport duality_check(const RModule& M, const EllipticCurve& E, int mmax,
                            const Bounds& bounds);

// True iff R_sub equals End E (saturation of a finite-index subring fails at
// every prime dividing the index). NotSubring if R_sub does not embed.
bool is_saturated(const QuadOrder& R_sub, const EllipticCurve& E, const Bounds& bounds);

// Model record pairing a curve with a module, with the torsion memo table.
class VarietyModel {
  public:
    VarietyModel(EllipticCurve curve, RModule module, const Bounds& bounds);

    const EllipticCurve& curve() const { return curve_; }
    const RModule& module() const { return module_; }
    int dim() const { return module_.rank; }
    bool saturated() const { return saturated_; }

    const TorsionRealization& torsion(i64 l, int e, const Bounds& bounds) const;
    Z count(int m, const Bounds& bounds) const;

  private:
    EllipticCurve curve_;
    RModule module_;
    bool saturated_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<i64, int>, TorsionRealization> cache_;
};

// Characteristic polynomial of an integer matrix (monic, low-to-high degree).
std::vector<Z> char_poly(const Mat& m);

} // namespace isopower::functor

#endif
