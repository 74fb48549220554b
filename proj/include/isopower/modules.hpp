#ifndef ISOPOWER_MODULES_HPP
#define ISOPOWER_MODULES_HPP

#include <optional>
#include <vector>

#include "isopower/orders.hpp"

namespace isopower::modules {

using orders::KElem;
using orders::KLat;
using orders::QuadForm;
using orders::QuadIdeal;
using orders::QuadOrder;
using zmat::Mat;
using zmat::Z;
using i64 = std::int64_t;

// Finitely presented torsion-free module over a quadratic order R, stored as
// a full-rank R-stable lattice in K^n. Row j of `lat` has K-coordinates
// (x_1, y_1, ..., x_n, y_n) meaning sum_j (x_j + y_j w_K)/den * e_j.
struct RModule {
    QuadOrder base;
    int rank = 0;
    Z den = 1;
    Mat lat; // 2n x 2n, HNF

    bool operator==(const RModule&) const = default;
};

// Canonical invariant of Theorem-2.2 type: conductor chain f_n | ... | f_1
// (stored largest first) plus the Steinitz class in Pic(R_{f_n}).
struct ModuleNF {
    std::vector<i64> conductors;
    QuadForm steinitz;

    bool operator==(const ModuleNF&) const = default;
    auto operator<=>(const ModuleNF&) const = default;
};

RModule module_from_ideals(const QuadOrder& R, const std::vector<QuadIdeal>& ideals);

// Cokernel of the row-vector map R^m -> R^n, v -> v X. Entries of X are
// elements of R given in (1, w_K) coordinates (w_K-part divisible by the
// conductor). HasTorsion if the cokernel has a torsion part.
RModule module_from_presentation(const QuadOrder& R, int m, int n,
                                 const std::vector<KElem>& X);

// Direct construction from an invariant (for enumeration and tests).
RModule module_from_nf(const QuadOrder& R, const ModuleNF& nf);

ModuleNF normal_form(const RModule& M);

bool is_isomorphic(const RModule& A, const RModule& B);

// M* = Hom_R(M, R) viewed as a left module through complex conjugation.
RModule dual_module(const RModule& M);

std::vector<ModuleNF> enumerate_modules(const QuadOrder& R, int n,
                                        const Bounds& bounds = {});

// Matrix W of the action of f*w_K on the lattice basis (row i of W gives the
// coordinates of f*w_K * b_i in the basis): the input to torsion realization.
Mat omega_action(const RModule& M);

// Lattice of Hom_R(A, B) inside Hom_K(K^n, K^n'); each row encodes a K-matrix
// (pairs of (1, w_K)-coordinates, row-major over the n' x n entry grid), with
// the common denominator returned separately.
std::pair<Mat, Z> hom_module_lattice(const RModule& A, const RModule& B);

// Whether the K-matrix phi (n' x n over K, common denominator phi_den) maps
// A onto exactly B (an isomorphism of modules).
bool maps_onto(const RModule& A, const RModule& B, const Mat& phi, const Z& phi_den);

} // namespace isopower::modules

#endif
