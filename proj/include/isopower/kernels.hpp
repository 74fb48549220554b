#ifndef ISOPOWER_KERNELS_HPP
#define ISOPOWER_KERNELS_HPP

#include <optional>
#include <set>
#include <vector>

#include "isopower/functor.hpp"

namespace isopower::kernels {

using arith::EllipticCurve;
using functor::CurveOrderData;
using modmat::M2;
using i64 = std::int64_t;

// C/l^e C, the commutant of (End E) tensor Z_l acting on E[l^e].
struct Commutant {
    i64 l = 0;
    int e = 0;
    i64 mod = 0;
    enum class Shape {
        ScalarOnlyM2, // C is all of M_2 (End of rank 1; never over finite fields)
        Rank2,        // C = R_l, a rank-2 saturated subalgebra
        ZlCenter,     // R_l is all of M_2 (rank-4 End), C = scalars
    } shape = Shape::Rank2;
    std::vector<M2> basis; // Z/l^e-module generators of C/l^e C
};

Commutant commutant(const EllipticCurve& E, i64 l, int e, const Bounds& bounds);

// Subgroup of E[l^e]^r given by generators in (Z/l^e)^{2r}.
struct SubgroupData {
    i64 l = 0;
    int e = 0;
    int r = 1;
    std::vector<std::vector<i64>> generators;
};

// Full element set of the generated subgroup (guarded).
std::set<std::vector<i64>> subgroup_elements(const SubgroupData& G);

// Prop 6.6 criterion: Galois-stable subgroup is a kernel subgroup iff it is
// a C/l^e C-submodule. NotGaloisStable if Frobenius does not preserve it.
bool is_kernel_subgroup(const EllipticCurve& E, const SubgroupData& G, const Bounds& bounds);

using SubgroupSet = std::set<std::set<std::vector<i64>>>;

// Independent oracle: kernels of all s x r matrices over (End E)/l^e acting
// on E[l^e]^r, s <= s_max, deduplicated (including s = 0, the full group).
SubgroupSet brute_force_kernels(const EllipticCurve& E, i64 l, int e, int r, int s_max,
                                const Bounds& bounds);

// All Frobenius-stable subgroups of E[l^e]^r (for the oracle comparison).
SubgroupSet frobenius_stable_subgroups(const EllipticCurve& E, i64 l, int e, int r,
                                       const Bounds& bounds);

struct GaloisImageReport {
    bool surjective = false;
    int algebra_dim = 0;
    int commutant_dim = 0;
    enum class Obstruction { None, Borel, NonsplitCartan, ProperSubalgebra } obstruction =
        Obstruction::None;
};

// Whether the matrices generate C/lC as an algebra; when C is the full
// matrix algebra and they do not, classifies the obstruction as a Borel
// (common eigenvector) or a nonsplit Cartan (commutative field).
GaloisImageReport galois_image_test(const std::vector<M2>& mats,
                                    const std::vector<M2>& c_basis, i64 l);

} // namespace isopower::kernels

#endif
