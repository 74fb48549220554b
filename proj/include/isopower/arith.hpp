#ifndef ISOPOWER_ARITH_HPP
#define ISOPOWER_ARITH_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "isopower/config.hpp"
#include "isopower/errors.hpp"
#include "isopower/modmat.hpp"

namespace isopower::arith {

using i64 = std::int64_t;

// Field elements are encoded as integers in [0, q): the element
// sum c_i x^i maps to sum c_i p^i.
using Code = i64;

// F_{p^m} = F_p[x]/(modulus), where the modulus is the lexicographically
// smallest monic irreducible of degree m (coefficients compared from x^{m-1}
// down to the constant term). Immutable after construction; the internal
// square-root tables are lazily built memo state.
class FiniteField {
  public:
    i64 p;
    int m;
    i64 q; // p^m
    std::vector<i64> modulus; // c_0..c_{m-1} of the monic modulus

    Code zero() const { return 0; }
    Code one() const { return from_int(1); }
    Code from_int(i64 v) const;
    std::vector<i64> decode(Code a) const;
    Code encode(const std::vector<i64>& digits) const;

    Code add(Code a, Code b) const;
    Code sub(Code a, Code b) const;
    Code neg(Code a) const;
    Code mul(Code a, Code b) const;
    Code inv(Code a) const;
    Code div(Code a, Code b) const { return mul(a, inv(b)); }
    Code pow(Code a, i64 e) const;
    Code pow_pk(Code a, int k) const; // a^(p^k)

    // Smallest square root of a if a is a square (any characteristic).
    std::optional<Code> sqrt(Code a) const;
    // Smallest z with z^2 + z = a (characteristic 2 only).
    std::optional<Code> artin_schreier(Code a) const;

    bool same_field(const FiniteField& o) const {
        return p == o.p && m == o.m && modulus == o.modulus;
    }

  private:
    friend std::shared_ptr<const FiniteField> field_create(i64, int, const Bounds&);
    void ensure_tables() const;
    void ensure_as_solver() const;

    mutable std::once_flag table_once_;
    mutable std::vector<Code> sqrt_table_;      // odd char, q small: z^2 -> min z, else -1
    mutable std::once_flag as_once_;
    mutable std::vector<i64> as_rows_, as_sol_; // char 2: solver for z^2+z=a
    mutable std::vector<int> as_piv_;
    mutable i64 ts_nonresidue_ = -1;            // odd char Tonelli-Shanks seed
};

using Field = std::shared_ptr<const FiniteField>;

// Deterministic field constructor; see FiniteField. Same (p, m) always
// produces an identical object.
Field field_create(i64 p, int m, const Bounds& bounds = {});

// Canonical embedding F_{p^m} -> F_{p^(m*k)} sending the generator to the
// smallest root of the source modulus in the target field.
struct Embedding {
    Field from, to;
    Code gen_image = 0;
    Code map(Code a) const;
};
Embedding embed_field(const Field& from, const Field& to);

struct CurvePoint {
    bool inf = true;
    Code x = 0, y = 0;

    static CurvePoint infinity() { return {}; }
    static CurvePoint affine(Code x, Code y) { return {false, x, y}; }
    bool operator==(const CurvePoint&) const = default;
    bool operator<(const CurvePoint& o) const {
        if (inf != o.inf) return inf && !o.inf;
        if (x != o.x) return x < o.x;
        return y < o.y;
    }
};

// Long Weierstrass curve y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over
// its coefficient field. Nonsingularity is checked on construction.
struct EllipticCurve {
    Field field;
    std::array<Code, 5> a; // a1, a2, a3, a4, a6
    Code disc = 0;

    Code a1() const { return a[0]; }
    Code a2() const { return a[1]; }
    Code a3() const { return a[2]; }
    Code a4() const { return a[3]; }
    Code a6() const { return a[4]; }
};

EllipticCurve curve_create(const Field& F, Code a1, Code a2, Code a3, Code a4, Code a6);

// Same curve viewed over an extension (coefficients pushed through the
// embedding).
EllipticCurve base_change(const EllipticCurve& E, const Embedding& emb);

bool on_curve(const EllipticCurve& E, const CurvePoint& P);
CurvePoint point_neg(const EllipticCurve& E, const CurvePoint& P);
CurvePoint point_add(const EllipticCurve& E, const CurvePoint& P, const CurvePoint& Q);
CurvePoint point_mul(const EllipticCurve& E, i64 n, const CurvePoint& P);
// q0-power Frobenius applied to a point over an extension of F_q0.
CurvePoint point_frob(const EllipticCurve& E, i64 q0_p, int q0_k, const CurvePoint& P);
// Order of P given the factored group order.
i64 point_order(const EllipticCurve& E, const CurvePoint& P, i64 group_order);

// Spec-shaped wrapper with an explicit field tag for mismatch detection.
CurvePoint point_op(const EllipticCurve& E, const Field& tag, const CurvePoint& P,
                    const CurvePoint& Q);

struct CountResult {
    i64 count = 0;   // #E(F_{q^m})
    i64 trace = 0;   // base-field trace t; char poly is x^2 - t x + q
    i64 q = 0;       // base field order
    int ext = 1;     // m
};

// Exhaustive point count over the curve's own field.
i64 count_points_naive(const EllipticCurve& E, const Bounds& bounds);
// Trace of Frobenius over F_{q^m} from the base trace (Weil recurrence).
i64 trace_ext(i64 t, i64 q, int m);
// #E(F_{q^m}) from the base trace.
i64 count_ext(i64 t, i64 q, int m);
// Base count is exhaustive; extension counts come from the recurrence.
CountResult point_count(const EllipticCurve& E, int m, const Bounds& bounds);

struct GroupStructure {
    i64 d1 = 1, d2 = 1;          // E(F_{q^m}) = Z/d1 x Z/d2, d1 | d2
    CurvePoint g1, g2;           // generators over the extension (g1 order d1)
    EllipticCurve curve;         // base-changed curve the generators live on
    i64 n = 1;                   // group order
};

GroupStructure group_structure(const EllipticCurve& E, int m, const Bounds& bounds);

// E[l^e](k_s) realized over the minimal extension where it is rational,
// together with the matrix of the q-power Frobenius on the chosen basis.
struct TorsionLattice {
    i64 l = 0;
    int e = 0;
    i64 mod = 0;       // l^e
    int ext_degree = 0; // minimal m with E[l^e] defined over F_{q^m}
    EllipticCurve curve; // base-changed curve
    CurvePoint b1, b2;
    modmat::M2 frob;
};

TorsionLattice torsion_basis(const EllipticCurve& E, i64 l, int e, const Bounds& bounds);

// Digit-lifted two-dimensional discrete log: P = a*B1 + b*B2 in E[l^e].
std::pair<i64, i64> torsion_coordinates(const TorsionLattice& T, const CurvePoint& P);

bool is_prime(i64 n);
std::vector<std::pair<i64, int>> factorize(i64 n);

} // namespace isopower::arith

#endif
