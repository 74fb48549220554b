#ifndef ISOPOWER_MODMAT_HPP
#define ISOPOWER_MODMAT_HPP

#include <cstdint>
#include <optional>

#include "isopower/errors.hpp"

namespace isopower::modmat {

using i64 = std::int64_t;

inline i64 mod(i64 a, i64 M) {
    i64 r = a % M;
    return r < 0 ? r + M : r;
}

inline i64 mulmod(i64 a, i64 b, i64 M) { return mod(a * b, M); } // inputs reduced, M < 2^31

i64 pow_mod(i64 a, i64 e, i64 M);

// Inverse of a mod M; nullopt if gcd(a, M) != 1.
std::optional<i64> inv_mod(i64 a, i64 M);

// 2x2 matrix over Z/M, entries reduced.
struct M2 {
    i64 a = 0, b = 0, c = 0, d = 0;

    static M2 identity() { return {1, 0, 0, 1}; }
    static M2 scalar(i64 s, i64 M) { return {mod(s, M), 0, 0, mod(s, M)}; }
    bool operator==(const M2&) const = default;
};

M2 mul(const M2& x, const M2& y, i64 M);
M2 add(const M2& x, const M2& y, i64 M);
M2 sub(const M2& x, const M2& y, i64 M);
M2 smul(i64 s, const M2& x, i64 M);
M2 pow(M2 x, i64 e, i64 M);

inline i64 trace(const M2& x, i64 M) { return mod(x.a + x.d, M); }
inline i64 det(const M2& x, i64 M) { return mod(x.a * x.d - x.b * x.c, M); }

// True iff x = s*I mod M; reports s.
bool is_scalar(const M2& x, i64 M, i64* s = nullptr);

// Divide every entry by l^v exactly (error if not divisible), then reduce
// mod M. Used to realize endomorphisms of the form (a + b*pi)/d on torsion.
M2 divide_exact(const M2& x, i64 lv, i64 M);

} // namespace isopower::modmat

#endif
