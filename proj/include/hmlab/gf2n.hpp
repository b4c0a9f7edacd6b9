#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hmlab {

namespace gf2 {

/// Degree of a polynomial over GF(2) packed little-endian into a word; -1 for 0.
inline int degree(uint64_t p) { return p == 0 ? -1 : 63 - __builtin_clzll(p); }

/// Carry-less product of two words (degrees sum to at most 126).
inline unsigned __int128 clmul(uint64_t a, uint64_t b) {
    unsigned __int128 acc = 0;
    while (b) {
        int i = __builtin_ctzll(b);
        acc ^= static_cast<unsigned __int128>(a) << i;
        b &= b - 1;
    }
    return acc;
}

/// Reduces a carry-less product modulo f (deg f = n, bit n set, n <= 63).
inline uint64_t reduce(unsigned __int128 prod, uint64_t f, int n) {
    for (int bit = 126; bit >= n; --bit) {
        if ((prod >> bit) & 1u) prod ^= static_cast<unsigned __int128>(f) << (bit - n);
    }
    return static_cast<uint64_t>(prod);
}

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t f, int n) {
    return reduce(clmul(a, b), f, n);
}

/// Remainder of a mod b, both packed polynomials, b != 0.
inline uint64_t polymod(uint64_t a, uint64_t b) {
    int db = degree(b);
    while (degree(a) >= db) a ^= b << (degree(a) - db);
    return a;
}

inline uint64_t polygcd(uint64_t a, uint64_t b) {
    while (b) {
        uint64_t r = polymod(a, b);
        a = b;
        b = r;
    }
    return a;
}

/// Rabin irreducibility test for f of degree n over GF(2).
inline bool is_irreducible(uint64_t f, int n) {
    if (n < 1 || degree(f) != n) return false;
    if (n == 1) return true;
    // x^(2^n) == x (mod f)
    uint64_t h = 0b10;
    for (int i = 0; i < n; ++i) h = mulmod(h, h, f, n);
    if (h != 0b10) return false;
    // gcd(x^(2^(n/p)) - x, f) == 1 for every prime p | n
    int rem = n;
    for (int p = 2; p * p <= rem; ++p) {
        if (rem % p != 0) continue;
        while (rem % p == 0) rem /= p;
        uint64_t g = 0b10;
        for (int i = 0; i < n / p; ++i) g = mulmod(g, g, f, n);
        if (degree(polygcd(g ^ 0b10ULL, f)) != 0) return false;
    }
    if (rem > 1) {
        uint64_t g = 0b10;
        for (int i = 0; i < n / rem; ++i) g = mulmod(g, g, f, n);
        if (degree(polygcd(g ^ 0b10ULL, f)) != 0) return false;
    }
    return true;
}

}  // namespace gf2

/// Lexicographically least irreducible polynomial of degree n, as a bitmask
/// with bit n set. Deterministic; the default modulus for every field here.
inline uint64_t find_modulus(int n) {
    if (n < 1 || n > 63) throw std::invalid_argument("find_modulus: degree must be in [1, 63]");
    uint64_t top = 1ULL << n;
    for (uint64_t t = 0; t < top; ++t) {
        if (gf2::is_irreducible(top | t, n)) return top | t;
    }
    throw std::logic_error("find_modulus: no irreducible polynomial found");  // unreachable
}

/// GF(2^N) in polynomial basis: elements are bitmasks < 2^N, bit j holding the
/// coefficient of x^j; arithmetic is carry-less multiply modulo `modulus`.
struct FieldSpec {
    int degree = 1;
    uint64_t modulus = 0b10;

    FieldSpec() = default;

    FieldSpec(int n, uint64_t mod) : degree(n), modulus(mod) {
        if (n < 1 || n > 63) throw std::invalid_argument("FieldSpec: degree must be in [1, 63]");
        if (gf2::degree(mod) != n) throw std::invalid_argument("FieldSpec: modulus degree mismatch");
        if (!gf2::is_irreducible(mod, n)) throw std::invalid_argument("FieldSpec: modulus is reducible");
    }

    static FieldSpec lexmin(int n) { return FieldSpec(n, find_modulus(n)); }

    uint64_t order() const { return 1ULL << degree; }
    uint64_t mask() const { return order() - 1; }

    uint64_t add(uint64_t a, uint64_t b) const {
        check(a);
        check(b);
        return a ^ b;
    }

    uint64_t mul(uint64_t a, uint64_t b) const {
        check(a);
        check(b);
        uint64_t acc = 0;
        while (b) {
            if (b & 1u) acc ^= a;
            b >>= 1;
            a <<= 1;
            if ((a >> degree) & 1u) a ^= modulus;
        }
        return acc;
    }

    uint64_t pow(uint64_t a, uint64_t e) const {
        check(a);
        uint64_t out = 1;
        while (e) {
            if (e & 1u) out = mul(out, a);
            a = mul(a, a);
            e >>= 1;
        }
        return out;
    }

    uint64_t inv(uint64_t a) const {
        if (a == 0) throw std::invalid_argument("FieldSpec::inv: zero has no inverse");
        return pow(a, order() - 2);
    }

    bool operator==(const FieldSpec&) const = default;

  private:
    void check(uint64_t v) const {
        if (v >> degree)
            throw std::invalid_argument("FieldSpec: element out of range for GF(2^" +
                                        std::to_string(degree) + ")");
    }
};

}  // namespace hmlab
