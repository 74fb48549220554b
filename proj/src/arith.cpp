#include "isopower/arith.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

namespace isopower::arith {

namespace {

constexpr i64 kSqrtTableCap = 4'000'000;

// --- dense polynomial helpers over F_p (coefficients as plain residues) ---

using Poly = std::vector<i64>; // low-to-high, no trailing zeros enforced by trim

void trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly poly_mul_fp(const Poly& a, const Poly& b, i64 p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); i++) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); j++) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    trim(r);
    return r;
}

// reduce mod monic modulus (c_0..c_{m-1}, leading 1 implicit)
Poly poly_mod_fp(Poly f, const std::vector<i64>& mod_lo, i64 p) {
    int m = static_cast<int>(mod_lo.size());
    while (static_cast<int>(f.size()) > m) {
        i64 lead = f.back();
        int d = static_cast<int>(f.size()) - 1 - m;
        if (lead != 0)
            for (int i = 0; i < m; i++)
                f[d + i] = ((f[d + i] - lead * mod_lo[i]) % p + p) % p;
        f.pop_back();
    }
    trim(f);
    return f;
}

Poly poly_pow_p_fp(const Poly& base, i64 e, const std::vector<i64>& mod_lo, i64 p) {
    Poly r = {1};
    Poly b = base;
    while (e > 0) {
        if (e & 1) r = poly_mod_fp(poly_mul_fp(r, b, p), mod_lo, p);
        b = poly_mod_fp(poly_mul_fp(b, b, p), mod_lo, p);
        e >>= 1;
    }
    return r;
}

Poly poly_gcd_fp(Poly a, Poly b, i64 p) {
    auto inv_fp = [&](i64 v) {
        i64 g = p, x = 0, x1 = 1, v1 = ((v % p) + p) % p;
        while (v1 != 0) {
            i64 qq = g / v1;
            g -= qq * v1;
            std::swap(g, v1);
            x -= qq * x1;
            std::swap(x, x1);
        }
        return ((x % p) + p) % p;
    };
    while (!b.empty()) {
        // a mod b
        i64 il = inv_fp(b.back());
        while (a.size() >= b.size() && !a.empty()) {
            i64 c = (a.back() * il) % p;
            size_t off = a.size() - b.size();
            if (c != 0)
                for (size_t i = 0; i < b.size(); i++)
                    a[off + i] = ((a[off + i] - c * b[i]) % p + p) % p;
            a.pop_back();
            trim(a);
            if (a.size() < b.size()) break;
        }
        std::swap(a, b);
    }
    return a;
}

bool poly_irreducible_fp(const std::vector<i64>& mod_lo, i64 p) {
    int m = static_cast<int>(mod_lo.size());
    if (m == 1) return true;
    // x^(p^m) == x mod f, and gcd(x^(p^(m/r)) - x, f) == 1 for prime r | m.
    Poly x = {0, 1};
    Poly xp = x;
    std::vector<Poly> iterates(m + 1); // iterates[k] = x^(p^k) mod f
    iterates[0] = x;
    for (int k = 1; k <= m; k++) {
        xp = poly_pow_p_fp(xp, p, mod_lo, p);
        iterates[k] = xp;
    }
    Poly diff = iterates[m];
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = ((diff[1] - 1) % p + p) % p;
    trim(diff);
    if (!diff.empty()) return false;
    for (int r = 2; r <= m; r++) {
        if (m % r != 0) continue;
        bool prime = true;
        for (int d = 2; d * d <= r; d++)
            if (r % d == 0) prime = false;
        if (!prime) continue;
        Poly g = iterates[m / r];
        if (g.size() < 2) g.resize(2, 0);
        g[1] = ((g[1] - 1) % p + p) % p;
        trim(g);
        Poly full(mod_lo);
        full.push_back(1);
        if (poly_gcd_fp(full, g, p).size() != 1) return false;
    }
    return true;
}

i64 ipow_checked(i64 b, int e, i64 cap) {
    i64 r = 1;
    for (int i = 0; i < e; i++) {
        if (r > cap / b) return -1;
        r *= b;
    }
    return r;
}

} // namespace

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; d++)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
    std::vector<std::pair<i64, int>> out;
    for (i64 d = 2; d * d <= n; d++) {
        if (n % d) continue;
        int e = 0;
        while (n % d == 0) { n /= d; e++; }
        out.push_back({d, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

// ---------------------------------------------------------------------------
// FiniteField

Code FiniteField::from_int(i64 v) const {
    v %= p;
    if (v < 0) v += p;
    return v;
}

std::vector<i64> FiniteField::decode(Code a) const {
    std::vector<i64> d(m);
    for (int i = 0; i < m; i++) {
        d[i] = a % p;
        a /= p;
    }
    return d;
}

Code FiniteField::encode(const std::vector<i64>& digits) const {
    Code a = 0;
    for (int i = std::min<int>(m, static_cast<int>(digits.size())) - 1; i >= 0; i--)
        a = a * p + ((digits[i] % p) + p) % p;
    return a;
}

Code FiniteField::add(Code a, Code b) const {
    if (m == 1) {
        i64 s = a + b;
        return s >= p ? s - p : s;
    }
    Code r = 0, mult = 1;
    for (int i = 0; i < m; i++) {
        i64 s = a % p + b % p;
        if (s >= p) s -= p;
        r += s * mult;
        mult *= p;
        a /= p;
        b /= p;
    }
    return r;
}

Code FiniteField::neg(Code a) const {
    Code r = 0, mult = 1;
    for (int i = 0; i < m; i++) {
        i64 d = a % p;
        r += (d == 0 ? 0 : p - d) * mult;
        mult *= p;
        a /= p;
    }
    return r;
}

Code FiniteField::sub(Code a, Code b) const { return add(a, neg(b)); }

Code FiniteField::mul(Code a, Code b) const {
    if (m == 1) return (a * b) % p;
    auto da = decode(a), db = decode(b);
    std::vector<i64> prod(2 * m - 1, 0);
    for (int i = 0; i < m; i++) {
        if (da[i] == 0) continue;
        for (int j = 0; j < m; j++) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
    }
    for (int k = 2 * m - 2; k >= m; k--) {
        i64 lead = prod[k];
        if (lead == 0) continue;
        for (int i = 0; i < m; i++)
            prod[k - m + i] = ((prod[k - m + i] - lead * modulus[i]) % p + p) % p;
        prod[k] = 0;
    }
    prod.resize(m);
    return encode(prod);
}

Code FiniteField::inv(Code a) const {
    if (a == 0) fail(ErrorKind::SingularMatrix, "division by zero field element");
    if (m == 1) {
        i64 g = p, x = 0, x1 = 1, a1 = a;
        while (a1 != 0) {
            i64 qq = g / a1;
            g -= qq * a1;
            std::swap(g, a1);
            x -= qq * x1;
            std::swap(x, x1);
        }
        return ((x % p) + p) % p;
    }
    // extended Euclid in F_p[x]
    i64 pp = p;
    auto inv_fp = [pp](i64 v) {
        i64 g = pp, x = 0, x1 = 1, v1 = ((v % pp) + pp) % pp;
        while (v1 != 0) {
            i64 qq = g / v1;
            g -= qq * v1;
            std::swap(g, v1);
            x -= qq * x1;
            std::swap(x, x1);
        }
        return ((x % pp) + pp) % pp;
    };
    Poly r0(modulus);
    r0.push_back(1);
    Poly r1 = decode(a);
    trim(r1);
    Poly s0 = {}, s1 = {1};
    while (!r1.empty()) {
        // divide r0 by r1
        Poly q;
        Poly rem = r0;
        i64 il = inv_fp(r1.back());
        if (rem.size() >= r1.size()) {
            q.assign(rem.size() - r1.size() + 1, 0);
            for (int k = static_cast<int>(rem.size()) - 1;
                 k >= static_cast<int>(r1.size()) - 1; k--) {
                if (static_cast<size_t>(k) >= rem.size() || rem[k] == 0) continue;
                i64 c = (rem[k] * il) % pp;
                q[k - r1.size() + 1] = c;
                for (size_t i = 0; i < r1.size(); i++) {
                    size_t idx = k - r1.size() + 1 + i;
                    rem[idx] = ((rem[idx] - c * r1[i]) % pp + pp) % pp;
                }
            }
            trim(rem);
        }
        Poly s2 = s0; // s2 = s0 - q*s1
        Poly qs = poly_mul_fp(q, s1, pp);
        if (s2.size() < qs.size()) s2.resize(qs.size(), 0);
        for (size_t i = 0; i < qs.size(); i++) s2[i] = ((s2[i] - qs[i]) % pp + pp) % pp;
        trim(s2);
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
    }
    // r0 = gcd (degree 0 since modulus irreducible)
    i64 c = inv_fp(r0[0]);
    Poly out = s0;
    for (auto& v : out) v = (v * c) % pp;
    out.resize(m, 0);
    return encode(out);
}

Code FiniteField::pow(Code a, i64 e) const {
    if (e < 0) return pow(inv(a), -e);
    Code r = one(), b = a;
    while (e > 0) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

Code FiniteField::pow_pk(Code a, int k) const {
    Code r = a;
    for (int i = 0; i < k; i++) r = pow(r, p);
    return r;
}

void FiniteField::ensure_tables() const {
    std::call_once(table_once_, [this]() {
        sqrt_table_.assign(q, -1);
        if (p != 2) {
            for (Code z = 0; z < q; z++) {
                Code s = mul(z, z);
                if (sqrt_table_[s] < 0 || z < sqrt_table_[s]) sqrt_table_[s] = z;
            }
        } else {
            for (Code z = 0; z < q; z++) {
                Code s = add(mul(z, z), z);
                if (sqrt_table_[s] < 0 || z < sqrt_table_[s]) sqrt_table_[s] = z;
            }
        }
    });
}

std::optional<Code> FiniteField::sqrt(Code a) const {
    if (p == 2) {
        Code r = pow_pk(a, m - 1); // squaring is bijective
        return r;
    }
    if (a == 0) return Code{0};
    if (q <= kSqrtTableCap) {
        ensure_tables();
        Code r = sqrt_table_[a];
        if (r < 0) return std::nullopt;
        return r;
    }
    // Tonelli-Shanks
    if (pow(a, (q - 1) / 2) != one()) return std::nullopt;
    i64 t = q - 1;
    int s = 0;
    while (t % 2 == 0) { t /= 2; s++; }
    Code nres = 0;
    for (Code c = 2; c < q; c++)
        if (pow(c, (q - 1) / 2) != one()) { nres = c; break; }
    Code z = pow(nres, t);
    int M = s;
    Code cc = z;
    Code r = pow(a, (t + 1) / 2);
    Code u = pow(a, t);
    while (u != one()) {
        int i = 0;
        Code v = u;
        while (v != one()) { v = mul(v, v); i++; }
        Code b = cc;
        for (int j = 0; j < M - i - 1; j++) b = mul(b, b);
        M = i;
        cc = mul(b, b);
        u = mul(u, cc);
        r = mul(r, b);
    }
    return std::min(r, neg(r));
}

std::optional<Code> FiniteField::artin_schreier(Code a) const {
    assert(p == 2);
    if (q <= kSqrtTableCap) {
        ensure_tables();
        Code r = sqrt_table_[a]; // table stores min z with z^2+z = value
        if (r < 0) return std::nullopt;
        return r;
    }
    // Solve the F_2-linear system z^2 + z = a on the power basis.
    // Codes are bitmasks of coordinates since p = 2.
    std::vector<i64> cols(m);
    for (int j = 0; j < m; j++) {
        Code ej = Code{1} << j;
        cols[j] = add(mul(ej, ej), ej);
    }
    // Gaussian elimination on [A | b] where column j of A is cols[j].
    std::vector<i64> rowsA(m, 0);
    std::vector<int> rowsB(m, 0);
    for (int i = 0; i < m; i++) {
        i64 mask = 0;
        for (int j = 0; j < m; j++)
            if ((cols[j] >> i) & 1) mask |= (i64{1} << j);
        rowsA[i] = mask;
        rowsB[i] = static_cast<int>((a >> i) & 1);
    }
    std::vector<int> pivot_of_col(m, -1);
    int rr = 0;
    for (int c = 0; c < m && rr < m; c++) {
        int sel = -1;
        for (int i = rr; i < m; i++)
            if ((rowsA[i] >> c) & 1) { sel = i; break; }
        if (sel < 0) continue;
        std::swap(rowsA[rr], rowsA[sel]);
        std::swap(rowsB[rr], rowsB[sel]);
        for (int i = 0; i < m; i++) {
            if (i != rr && ((rowsA[i] >> c) & 1)) {
                rowsA[i] ^= rowsA[rr];
                rowsB[i] ^= rowsB[rr];
            }
        }
        pivot_of_col[c] = rr;
        rr++;
    }
    Code sol = 0;
    for (int i = rr; i < m; i++)
        if (rowsB[i]) return std::nullopt; // inconsistent: trace(a) = 1
    for (int c = 0; c < m; c++)
        if (pivot_of_col[c] >= 0 && rowsB[pivot_of_col[c]]) sol |= (Code{1} << c);
    return std::min(sol, sol ^ 1);
}

Field field_create(i64 p, int m, const Bounds& bounds) {
    if (!is_prime(p)) fail(ErrorKind::NotPrime, "p = " + std::to_string(p) + " is not prime");
    if (m < 1) fail(ErrorKind::DegreeOutOfRange, "extension degree must be >= 1");
    i64 q = ipow_checked(p, m, bounds.field_order);
    if (q < 0)
        fail(ErrorKind::DegreeOutOfRange,
             "field order p^m exceeds the configured cap " + std::to_string(bounds.field_order));
    auto F = std::make_shared<FiniteField>();
    F->p = p;
    F->m = m;
    F->q = q;
    // Scan candidate moduli in lexicographic order (x^{m-1} coefficient most
    // significant) and take the first irreducible.
    if (m == 1) {
        F->modulus = {0}; // modulus x, prime-field convention
    } else {
        i64 total = 1;
        for (int i = 0; i < m; i++) total *= p;
        bool found = false;
        for (i64 n = 0; n < total; n++) {
            std::vector<i64> lo(m);
            i64 v = n;
            for (int i = 0; i < m; i++) { lo[i] = v % p; v /= p; }
            if (poly_irreducible_fp(lo, p)) {
                F->modulus = lo;
                found = true;
                break;
            }
        }
        if (!found) fail(ErrorKind::DegreeOutOfRange, "no irreducible modulus found");
    }
    return F;
}

// ---------------------------------------------------------------------------
// Embeddings

namespace {

// polynomial helpers over a general field, coefficients as codes
using FPoly = std::vector<Code>;

void ftrim(const FiniteField&, FPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

FPoly fmul(const FiniteField& F, const FPoly& a, const FPoly& b) {
    if (a.empty() || b.empty()) return {};
    FPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); i++) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); j++)
            r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    }
    ftrim(F, r);
    return r;
}

FPoly fmod(const FiniteField& F, FPoly a, const FPoly& b) {
    Code il = F.inv(b.back());
    while (a.size() >= b.size() && !a.empty()) {
        Code c = F.mul(a.back(), il);
        size_t off = a.size() - b.size();
        if (c != 0)
            for (size_t i = 0; i < b.size(); i++)
                a[off + i] = F.sub(a[off + i], F.mul(c, b[i]));
        a.pop_back();
        ftrim(F, a);
    }
    return a;
}

FPoly fgcd(const FiniteField& F, FPoly a, FPoly b) {
    while (!b.empty()) {
        FPoly r = fmod(F, a, b);
        a = b;
        b = r;
    }
    if (!a.empty()) { // make monic
        Code il = F.inv(a.back());
        for (auto& c : a) c = F.mul(c, il);
    }
    return a;
}

FPoly fpowmod(const FiniteField& F, FPoly base, i64 e, const FPoly& mod) {
    FPoly r = {F.one()};
    base = fmod(F, base, mod);
    while (e > 0) {
        if (e & 1) r = fmod(F, fmul(F, r, base), mod);
        base = fmod(F, fmul(F, base, base), mod);
        e >>= 1;
    }
    return r;
}

void find_roots(const FiniteField& F, const FPoly& f, std::vector<Code>& out) {
    if (f.size() <= 1) return;
    if (f.size() == 2) {
        out.push_back(F.neg(F.mul(f[0], F.inv(f[1]))));
        return;
    }
    if (F.p != 2) {
        for (Code shift = 0;; shift++) {
            FPoly r = {shift, F.one()};
            FPoly h = fpowmod(F, r, (F.q - 1) / 2, f);
            if (h.empty())
                h = {F.sub(0, F.one())};
            else {
                if (h.empty()) h.resize(1, 0);
                h[0] = F.sub(h[0], F.one());
                ftrim(F, h);
            }
            FPoly g = fgcd(F, f, h);
            if (g.size() > 1 && g.size() < f.size()) {
                // f = g * (f/g)
                FPoly rest = f;
                // synthetic division rest / g
                FPoly quot(rest.size() - g.size() + 1, 0);
                FPoly rem = rest;
                Code il = F.inv(g.back());
                for (int k = static_cast<int>(rem.size()) - 1;
                     k >= static_cast<int>(g.size()) - 1; k--) {
                    Code c = F.mul(rem[k], il);
                    quot[k - g.size() + 1] = c;
                    if (c != 0)
                        for (size_t i = 0; i < g.size(); i++)
                            rem[k - g.size() + 1 + i] =
                                F.sub(rem[k - g.size() + 1 + i], F.mul(c, g[i]));
                }
                ftrim(F, quot);
                find_roots(F, g, out);
                find_roots(F, quot, out);
                return;
            }
        }
    } else {
        // char 2: trace construction
        for (Code c = 1;; c++) {
            FPoly acc = {0};
            FPoly term = {0, c}; // c*x
            for (int i = 0; i < F.m; i++) {
                if (acc.size() < term.size()) acc.resize(term.size(), 0);
                for (size_t j = 0; j < term.size(); j++) acc[j] = F.add(acc[j], term[j]);
                term = fmod(F, fmul(F, term, term), f);
            }
            ftrim(F, acc);
            FPoly g = fgcd(F, f, acc);
            if (g.size() > 1 && g.size() < f.size()) {
                FPoly quot(f.size() - g.size() + 1, 0);
                FPoly rem = f;
                Code il = F.inv(g.back());
                for (int k = static_cast<int>(rem.size()) - 1;
                     k >= static_cast<int>(g.size()) - 1; k--) {
                    Code cc = F.mul(rem[k], il);
                    quot[k - g.size() + 1] = cc;
                    if (cc != 0)
                        for (size_t i = 0; i < g.size(); i++)
                            rem[k - g.size() + 1 + i] =
                                F.sub(rem[k - g.size() + 1 + i], F.mul(cc, g[i]));
                }
                ftrim(F, quot);
                find_roots(F, g, out);
                find_roots(F, quot, out);
                return;
            }
        }
    }
}

} // namespace

Code Embedding::map(Code a) const {
    // element = sum of digits c_i * alpha^i; evaluate at gen_image
    auto digits = from->decode(a);
    Code acc = 0;
    for (int i = from->m - 1; i >= 0; i--)
        acc = to->add(to->mul(acc, gen_image), to->from_int(digits[i]));
    return acc;
}

Embedding embed_field(const Field& from, const Field& to) {
    if (from->p != to->p || to->m % from->m != 0)
        fail(ErrorKind::FieldMismatch, "no embedding between these fields");
    Embedding e;
    e.from = from;
    e.to = to;
    if (from->m == to->m) {
        // identity (same canonical field)
        e.gen_image = from->m == 1 ? 0 : from->p;
        return e;
    }
    FPoly f(from->m + 1);
    for (int i = 0; i < from->m; i++) f[i] = to->from_int(from->modulus[i]);
    f[from->m] = to->one();
    // all roots of the modulus in the target; canonical image = smallest
    FPoly xq = fpowmod(*to, FPoly{0, to->one()}, to->q, f);
    if (xq.size() < 2) xq.resize(2, 0);
    xq[1] = to->sub(xq[1], to->one());
    ftrim(*to, xq);
    FPoly g = fgcd(*to, f, xq);
    std::vector<Code> roots;
    find_roots(*to, g, roots);
    if (roots.empty()) fail(ErrorKind::FieldMismatch, "modulus has no root in target field");
    e.gen_image = *std::min_element(roots.begin(), roots.end());
    return e;
}

// ---------------------------------------------------------------------------
// Curves

EllipticCurve curve_create(const Field& F, Code a1, Code a2, Code a3, Code a4, Code a6) {
    EllipticCurve E;
    E.field = F;
    E.a = {a1, a2, a3, a4, a6};
    const FiniteField& f = *F;
    auto I = [&](i64 v) { return f.from_int(v); };
    Code b2 = f.add(f.mul(a1, a1), f.mul(I(4), a2));
    Code b4 = f.add(f.mul(I(2), a4), f.mul(a1, a3));
    Code b6 = f.add(f.mul(a3, a3), f.mul(I(4), a6));
    Code b8 = f.add(f.add(f.mul(f.mul(a1, a1), a6), f.mul(I(4), f.mul(a2, a6))),
                    f.add(f.sub(f.mul(a2, f.mul(a3, a3)), f.mul(a1, f.mul(a3, a4))),
                          f.neg(f.mul(a4, a4))));
    Code disc = f.add(f.add(f.neg(f.mul(f.mul(b2, b2), b8)), f.neg(f.mul(I(8), f.mul(b4, f.mul(b4, b4))))),
                      f.add(f.neg(f.mul(I(27), f.mul(b6, b6))), f.mul(I(9), f.mul(b2, f.mul(b4, b6)))));
    if (disc == 0) fail(ErrorKind::SingularCurve, "curve discriminant vanishes");
    E.disc = disc;
    return E;
}

EllipticCurve base_change(const EllipticCurve& E, const Embedding& emb) {
    if (!emb.from->same_field(*E.field))
        fail(ErrorKind::FieldMismatch, "embedding does not start at the curve's field");
    return curve_create(emb.to, emb.map(E.a[0]), emb.map(E.a[1]), emb.map(E.a[2]),
                        emb.map(E.a[3]), emb.map(E.a[4]));
}

bool on_curve(const EllipticCurve& E, const CurvePoint& P) {
    if (P.inf) return true;
    const FiniteField& f = *E.field;
    Code x = P.x, y = P.y;
    Code lhs = f.add(f.mul(y, y), f.add(f.mul(E.a1(), f.mul(x, y)), f.mul(E.a3(), y)));
    Code rhs = f.add(f.mul(x, f.mul(x, x)),
                     f.add(f.mul(E.a2(), f.mul(x, x)), f.add(f.mul(E.a4(), x), E.a6())));
    return lhs == rhs;
}

CurvePoint point_neg(const EllipticCurve& E, const CurvePoint& P) {
    if (P.inf) return P;
    const FiniteField& f = *E.field;
    return CurvePoint::affine(P.x, f.sub(f.neg(P.y), f.add(f.mul(E.a1(), P.x), E.a3())));
}

CurvePoint point_add(const EllipticCurve& E, const CurvePoint& P, const CurvePoint& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    const FiniteField& f = *E.field;
    Code a1 = E.a1(), a2 = E.a2(), a3 = E.a3(), a4 = E.a4();
    Code lam;
    if (P.x == Q.x) {
        if (P.y != Q.y) return CurvePoint::infinity();
        Code den = f.add(f.add(P.y, P.y), f.add(f.mul(a1, P.x), a3));
        if (den == 0) return CurvePoint::infinity();
        Code num = f.add(f.add(f.mul(f.from_int(3), f.mul(P.x, P.x)),
                               f.mul(f.from_int(2), f.mul(a2, P.x))),
                         f.sub(a4, f.mul(a1, P.y)));
        lam = f.div(num, den);
    } else {
        lam = f.div(f.sub(Q.y, P.y), f.sub(Q.x, P.x));
    }
    Code x3 = f.sub(f.sub(f.add(f.mul(lam, lam), f.mul(a1, lam)), a2), f.add(P.x, Q.x));
    Code y3 = f.sub(f.sub(f.mul(lam, f.sub(P.x, x3)), P.y), f.add(f.mul(a1, x3), a3));
    return CurvePoint::affine(x3, y3);
}

CurvePoint point_mul(const EllipticCurve& E, i64 n, const CurvePoint& P) {
    if (n < 0) return point_mul(E, -n, point_neg(E, P));
    CurvePoint r = CurvePoint::infinity();
    CurvePoint b = P;
    while (n > 0) {
        if (n & 1) r = point_add(E, r, b);
        b = point_add(E, b, b);
        n >>= 1;
    }
    return r;
}

CurvePoint point_frob(const EllipticCurve& E, i64 /*q0_p*/, int q0_k, const CurvePoint& P) {
    if (P.inf) return P;
    const FiniteField& f = *E.field;
    return CurvePoint::affine(f.pow_pk(P.x, q0_k), f.pow_pk(P.y, q0_k));
}

i64 point_order(const EllipticCurve& E, const CurvePoint& P, i64 group_order) {
    i64 o = group_order;
    for (auto [r, k] : factorize(group_order)) {
        (void)k;
        while (o % r == 0 && point_mul(E, o / r, P).inf) o /= r;
    }
    return o;
}

CurvePoint point_op(const EllipticCurve& E, const Field& tag, const CurvePoint& P,
                    const CurvePoint& Q) {
    if (!tag->same_field(*E.field))
        fail(ErrorKind::FieldMismatch, "points and curve live over different fields");
    return point_add(E, P, Q);
}

// ---------------------------------------------------------------------------
// Counting

i64 count_points_naive(const EllipticCurve& E, const Bounds& bounds) {
    const FiniteField& f = *E.field;
    if (f.q > bounds.field_order)
        fail(ErrorKind::BoundExceeded, "field too large for exhaustive point count");
    i64 n = 1; // infinity
    Code a1 = E.a1(), a2 = E.a2(), a3 = E.a3(), a4 = E.a4(), a6 = E.a6();
    if (f.p != 2) {
        Code quarter = f.inv(f.from_int(4));
        for (Code x = 0; x < f.q; x++) {
            Code fx = f.add(f.mul(x, f.mul(x, x)),
                            f.add(f.mul(a2, f.mul(x, x)), f.add(f.mul(a4, x), a6)));
            Code c = f.add(f.mul(a1, x), a3);
            Code g = f.add(fx, f.mul(f.mul(c, c), quarter));
            if (g == 0)
                n += 1;
            else if (f.sqrt(g))
                n += 2;
        }
    } else {
        for (Code x = 0; x < f.q; x++) {
            Code fx = f.add(f.mul(x, f.mul(x, x)),
                            f.add(f.mul(a2, f.mul(x, x)), f.add(f.mul(a4, x), a6)));
            Code c = f.add(f.mul(a1, x), a3);
            if (c == 0) {
                n += 1; // unique y
            } else {
                Code rhs = f.mul(fx, f.inv(f.mul(c, c)));
                if (f.artin_schreier(rhs)) n += 2;
            }
        }
    }
    return n;
}

i64 trace_ext(i64 t, i64 q, int m) {
    // t_m = t*t_{m-1} - q*t_{m-2}, t_0 = 2
    i64 t0 = 2, t1 = t;
    if (m == 0) return 2;
    for (int i = 2; i <= m; i++) {
        i64 t2 = t * t1 - q * t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

i64 count_ext(i64 t, i64 q, int m) {
    i64 qm = 1;
    for (int i = 0; i < m; i++) qm *= q;
    return qm + 1 - trace_ext(t, q, m);
}

CountResult point_count(const EllipticCurve& E, int m, const Bounds& bounds) {
    const FiniteField& f = *E.field;
    CountResult r;
    r.q = f.q;
    r.ext = m;
    i64 n1 = count_points_naive(E, bounds);
    r.trace = f.q + 1 - n1;
    // Hasse bound sanity
    if (static_cast<double>(r.trace) * r.trace > 4.0 * f.q + 1e-9)
        fail(ErrorKind::CrossCheckMismatch, "Hasse bound violated; counting bug");
    if (m == 1) {
        r.count = n1;
    } else {
        if (m > bounds.extension_degree)
            fail(ErrorKind::BoundExceeded, "extension degree above cap");
        r.count = count_ext(r.trace, f.q, m);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Group structure

namespace {

struct PointScan {
    // deterministic x-ascending enumeration of affine points (min y first)
    const EllipticCurve& E;
    Code x = 0;
    int phase = 0; // 0 = try min y, 1 = try other y
    Code y0 = 0, y1 = 0;
    bool have = false;

    explicit PointScan(const EllipticCurve& e) : E(e) {}

    std::optional<CurvePoint> next() {
        const FiniteField& f = *E.field;
        while (true) {
            if (have && phase == 1) {
                phase = 0;
                Code yy = y1;
                Code xx = x;
                have = false;
                x++;
                if (yy != y0) return CurvePoint::affine(xx, yy);
                continue; // single y
            }
            if (x >= f.q) return std::nullopt;
            Code a1 = E.a1(), a2 = E.a2(), a3 = E.a3(), a4 = E.a4(), a6 = E.a6();
            Code fx = f.add(f.mul(x, f.mul(x, x)),
                            f.add(f.mul(a2, f.mul(x, x)), f.add(f.mul(a4, x), a6)));
            Code c = f.add(f.mul(a1, x), a3);
            if (f.p != 2) {
                Code g = f.add(fx, f.mul(f.mul(c, c), f.inv(f.from_int(4))));
                auto s = f.sqrt(g);
                if (!s) { x++; continue; }
                Code z = *s;
                Code half = f.inv(f.from_int(2));
                Code ya = f.sub(z, f.mul(c, half));
                Code yb = f.sub(f.neg(z), f.mul(c, half));
                y0 = std::min(ya, yb);
                y1 = std::max(ya, yb);
            } else {
                if (c == 0) {
                    Code yy = *f.sqrt(fx);
                    y0 = y1 = yy;
                } else {
                    auto z = f.artin_schreier(f.mul(fx, f.inv(f.mul(c, c))));
                    if (!z) { x++; continue; }
                    Code ya = f.mul(c, *z);
                    Code yb = f.add(ya, c); // other root z+1
                    y0 = std::min(ya, yb);
                    y1 = std::max(ya, yb);
                }
            }
            have = true;
            phase = 1;
            return CurvePoint::affine(x, y0);
        }
    }
};

// closure of S under adding multiples of Q (S must already be a subgroup)
void subgroup_extend(const EllipticCurve& E, std::set<CurvePoint>& S, const CurvePoint& Q,
                     i64 q_order) {
    if (S.count(Q)) return;
    std::vector<CurvePoint> mults;
    CurvePoint acc = CurvePoint::infinity();
    for (i64 j = 0; j < q_order; j++) {
        mults.push_back(acc);
        acc = point_add(E, acc, Q);
    }
    std::set<CurvePoint> out;
    for (const auto& s : S)
        for (const auto& mq : mults) out.insert(point_add(E, s, mq));
    S = std::move(out);
}

constexpr i64 kClosureCap = i64{1} << 22;

struct SylowData {
    int u = 0, w = 0;          // Z/l^u x Z/l^w, u <= w
    CurvePoint gu, gw;         // generators of the two factors
};

// Structure and generators of the l-Sylow subgroup of E(F), |E(F)| = N,
// where F has q_m elements.
SylowData sylow_structure(const EllipticCurve& E, i64 N, i64 l, int v, i64 qm) {
    SylowData out;
    i64 lv = 1;
    for (int i = 0; i < v; i++) lv *= l;
    i64 cof = N / lv;
    // The "small" factor of E(F) divides q_m - 1 (Weil pairing), so the
    // Sylow is cyclic whenever l does not divide q_m - 1.
    if (v == 1 || (qm - 1) % l != 0) {
        PointScan scan(E);
        while (true) {
            auto P = scan.next();
            if (!P) fail(ErrorKind::CrossCheckMismatch, "Sylow generator scan failed; bug");
            CurvePoint Q = point_mul(E, cof, *P);
            if (Q.inf) continue;
            if (point_order(E, Q, lv) == lv) {
                out.u = 0;
                out.w = v;
                out.gu = CurvePoint::infinity();
                out.gw = Q;
                return out;
            }
        }
    }
    if (lv > kClosureCap) fail(ErrorKind::BoundExceeded, "Sylow subgroup too large to enumerate");
    std::set<CurvePoint> S;
    S.insert(CurvePoint::infinity());
    PointScan scan(E);
    while (static_cast<i64>(S.size()) < lv) {
        auto P = scan.next();
        if (!P) fail(ErrorKind::CrossCheckMismatch, "Sylow closure failed; counting bug");
        CurvePoint Q = point_mul(E, cof, *P);
        if (Q.inf || S.count(Q)) continue;
        subgroup_extend(E, S, Q, point_order(E, Q, lv));
    }
    // max order element (smallest point attaining it), then complement
    i64 maxord = 1;
    for (const auto& s : S) {
        i64 o = point_order(E, s, lv);
        if (o > maxord) maxord = o;
    }
    int w = 0;
    for (i64 o = maxord; o > 1; o /= l) w++;
    int u = v - w;
    for (const auto& s : S)
        if (point_order(E, s, lv) == maxord) { out.gw = s; break; }
    out.u = u;
    out.w = w;
    if (u == 0) {
        out.gu = CurvePoint::infinity();
        return out;
    }
    i64 lu = 1;
    for (int i = 0; i < u; i++) lu *= l;
    for (const auto& s : S) {
        if (point_order(E, s, lv) != lu) continue;
        std::set<CurvePoint> T;
        T.insert(CurvePoint::infinity());
        subgroup_extend(E, T, out.gw, maxord);
        subgroup_extend(E, T, s, lu);
        if (static_cast<i64>(T.size()) == lv) { out.gu = s; return out; }
    }
    fail(ErrorKind::CrossCheckMismatch, "no Sylow complement found; structure bug");
}

} // namespace

GroupStructure group_structure(const EllipticCurve& E, int m, const Bounds& bounds) {
    const FiniteField& f = *E.field;
    GroupStructure gs;
    EllipticCurve Em = E;
    if (m > 1) {
        if (m > bounds.extension_degree)
            fail(ErrorKind::BoundExceeded, "extension degree above cap");
        Field big = field_create(f.p, f.m * m, bounds);
        Em = base_change(E, embed_field(E.field, big));
    }
    gs.curve = Em;
    i64 N = count_points_naive(Em, bounds);
    gs.n = N;
    i64 d1 = 1, d2 = 1;
    CurvePoint g1 = CurvePoint::infinity(), g2 = CurvePoint::infinity();
    for (auto [l, v] : factorize(N)) {
        SylowData sd = sylow_structure(Em, N, l, v, Em.field->q);
        i64 lu = 1, lw = 1;
        for (int i = 0; i < sd.u; i++) lu *= l;
        for (int i = 0; i < sd.w; i++) lw *= l;
        d1 *= lu;
        d2 *= lw;
        g1 = point_add(Em, g1, sd.gu);
        g2 = point_add(Em, g2, sd.gw);
    }
    gs.d1 = d1;
    gs.d2 = d2;
    gs.g1 = g1;
    gs.g2 = g2;
    // order statistics verification
    if (d1 * d2 != N || d2 % d1 != 0 || point_order(Em, g1, N) != d1 ||
        point_order(Em, g2, N) != d2)
        fail(ErrorKind::CrossCheckMismatch, "group structure verification failed");
    i64 qm = Em.field->q;
    if ((qm - 1) % d1 != 0)
        fail(ErrorKind::CrossCheckMismatch, "d1 does not divide q^m - 1; structure bug");
    return gs;
}

// ---------------------------------------------------------------------------
// Torsion

TorsionLattice torsion_basis(const EllipticCurve& E, i64 l, int e, const Bounds& bounds) {
    const FiniteField& f = *E.field;
    if (!is_prime(l)) fail(ErrorKind::UsageError, "l must be prime");
    if (l == f.p) fail(ErrorKind::BadPrime, "l equals the field characteristic");
    if (e < 1) fail(ErrorKind::UsageError, "e must be >= 1");
    i64 L = 1;
    for (int i = 0; i < e; i++) L *= l;
    i64 L2 = L * L;

    i64 t = point_count(E, 1, bounds).trace;
    i64 q = f.q;

    for (int m = 1; m <= bounds.extension_degree; m++) {
        i64 qm = ipow_checked(q, m, bounds.field_order);
        if (qm < 0)
            fail(ErrorKind::BoundExceeded,
                 "torsion field F_{q^" + std::to_string(m) + "} exceeds the field-order cap");
        i64 N = count_ext(t, q, m);
        if (N % L2 != 0) continue;
        if ((qm - 1) % L != 0) continue;
        Field big = field_create(f.p, f.m * m, bounds);
        EllipticCurve Em = (m == 1) ? E : base_change(E, embed_field(E.field, big));
        int v = 0;
        i64 Nred = N;
        while (Nred % l == 0) { Nred /= l; v++; }
        SylowData sd = sylow_structure(Em, N, l, v, Em.field->q);
        if (sd.u < e) continue; // E[l^e] not rational here
        // smallest basis points of exact order l^e inside the Sylow set
        i64 lv = 1;
        for (int i = 0; i < v; i++) lv *= l;
        std::set<CurvePoint> S;
        S.insert(CurvePoint::infinity());
        subgroup_extend(Em, S, sd.gw, point_order(Em, sd.gw, lv));
        if (!sd.gu.inf) subgroup_extend(Em, S, sd.gu, point_order(Em, sd.gu, lv));
        CurvePoint b1 = CurvePoint::infinity(), b2 = CurvePoint::infinity();
        for (const auto& s : S) {
            if (point_order(Em, s, lv) != L) continue;
            if (b1.inf) { b1 = s; continue; }
            // independence: l^{e-1} multiples must span distinct lines
            CurvePoint t1 = point_mul(Em, L / l, b1);
            CurvePoint t2 = point_mul(Em, L / l, s);
            bool dep = false;
            CurvePoint acc = CurvePoint::infinity();
            for (i64 k = 0; k < l; k++) {
                if (acc == t2) { dep = true; break; }
                acc = point_add(Em, acc, t1);
            }
            if (!dep) { b2 = s; break; }
        }
        if (b1.inf || b2.inf)
            fail(ErrorKind::CrossCheckMismatch, "torsion basis selection failed; bug");
        TorsionLattice T;
        T.l = l;
        T.e = e;
        T.mod = L;
        T.ext_degree = m;
        T.curve = Em;
        T.b1 = b1;
        T.b2 = b2;
        // Frobenius (q-power) matrix on the basis
        CurvePoint fb1 = point_frob(Em, f.p, f.m, b1);
        CurvePoint fb2 = point_frob(Em, f.p, f.m, b2);
        auto [a11, a21] = torsion_coordinates(T, fb1);
        auto [a12, a22] = torsion_coordinates(T, fb2);
        // columns are images: frob * (coords of P) convention
        T.frob = {a11, a12, a21, a22};
        i64 tr = modmat::trace(T.frob, L);
        i64 dt = modmat::det(T.frob, L);
        if (tr != modmat::mod(t, L) || dt != modmat::mod(q, L))
            fail(ErrorKind::CrossCheckMismatch, "Frobenius matrix charpoly mismatch; bug");
        return T;
    }
    fail(ErrorKind::BoundExceeded, "no admissible extension degree within cap");
}

std::pair<i64, i64> torsion_coordinates(const TorsionLattice& T, const CurvePoint& P) {
    const EllipticCurve& E = T.curve;
    i64 l = T.l, L = T.mod;
    CurvePoint t1 = point_mul(E, L / l, T.b1);
    CurvePoint t2 = point_mul(E, L / l, T.b2);
    i64 a = 0, b = 0, lj = 1;
    for (int j = 0; j < T.e; j++) {
        CurvePoint D = point_add(E, P, point_neg(E, point_add(E, point_mul(E, a, T.b1),
                                                              point_mul(E, b, T.b2))));
        i64 step = L / (l * lj);
        CurvePoint U = point_mul(E, step, D);
        bool found = false;
        CurvePoint acc1 = CurvePoint::infinity();
        for (i64 c1 = 0; c1 < l && !found; c1++) {
            CurvePoint acc = acc1;
            for (i64 c2 = 0; c2 < l; c2++) {
                if (acc == U) {
                    a += c1 * lj;
                    b += c2 * lj;
                    found = true;
                    break;
                }
                acc = point_add(E, acc, t2);
            }
            acc1 = point_add(E, acc1, t1);
        }
        if (!found)
            fail(ErrorKind::CrossCheckMismatch, "point not in the torsion lattice");
        lj *= l;
    }
    CurvePoint check = point_add(E, point_mul(E, a, T.b1), point_mul(E, b, T.b2));
    if (!(check == P))
        fail(ErrorKind::CrossCheckMismatch, "torsion discrete log failed; bug");
    return {a, b};
}

} // namespace isopower::arith
