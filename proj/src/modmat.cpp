#include "isopower/modmat.hpp"

namespace isopower::modmat {

i64 pow_mod(i64 a, i64 e, i64 M) {
    a = mod(a, M);
    i64 r = mod(1, M);
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, M);
        a = mulmod(a, a, M);
        e >>= 1;
    }
    return r;
}

std::optional<i64> inv_mod(i64 a, i64 M) {
    a = mod(a, M);
    i64 g = M, x = 0, x1 = 1, a1 = a;
    while (a1 != 0) {
        i64 q = g / a1;
        g -= q * a1;
        std::swap(g, a1);
        x -= q * x1;
        std::swap(x, x1);
    }
    if (g != 1) return std::nullopt;
    return mod(x, M);
}

M2 mul(const M2& x, const M2& y, i64 M) {
    return {mod(x.a * y.a + x.b * y.c, M), mod(x.a * y.b + x.b * y.d, M),
            mod(x.c * y.a + x.d * y.c, M), mod(x.c * y.b + x.d * y.d, M)};
}

M2 add(const M2& x, const M2& y, i64 M) {
    return {mod(x.a + y.a, M), mod(x.b + y.b, M), mod(x.c + y.c, M), mod(x.d + y.d, M)};
}

M2 sub(const M2& x, const M2& y, i64 M) {
    return {mod(x.a - y.a, M), mod(x.b - y.b, M), mod(x.c - y.c, M), mod(x.d - y.d, M)};
}

M2 smul(i64 s, const M2& x, i64 M) {
    s = mod(s, M);
    return {mulmod(s, x.a, M), mulmod(s, x.b, M), mulmod(s, x.c, M), mulmod(s, x.d, M)};
}

M2 pow(M2 x, i64 e, i64 M) {
    M2 r = M2::scalar(1, M);
    while (e > 0) {
        if (e & 1) r = mul(r, x, M);
        x = mul(x, x, M);
        e >>= 1;
    }
    return r;
}

bool is_scalar(const M2& x, i64 M, i64* s) {
    if (mod(x.b, M) != 0 || mod(x.c, M) != 0) return false;
    if (mod(x.a - x.d, M) != 0) return false;
    if (s) *s = mod(x.a, M);
    return true;
}

M2 divide_exact(const M2& x, i64 lv, i64 M) {
    const i64 in[4] = {x.a, x.b, x.c, x.d};
    i64 out[4];
    for (int i = 0; i < 4; i++) {
        if (in[i] % lv != 0)
            fail(ErrorKind::DenominatorClash, "matrix entry not divisible at requested level");
        out[i] = mod(in[i] / lv, M);
    }
    return {out[0], out[1], out[2], out[3]};
}

} // namespace isopower::modmat
