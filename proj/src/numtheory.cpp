#include "zsm/numtheory.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace zsm::numtheory {

static uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t mod) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % mod);
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t mod) {
    if (mod == 0) throw std::invalid_argument("pow_mod: zero modulus");
    uint64_t acc = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1) acc = mul_mod(acc, base, mod);
        base = mul_mod(base, base, mod);
        exp >>= 1;
    }
    return acc;
}

uint64_t inv_mod(uint64_t a, uint64_t q) {
    a %= q;
    if (a == 0) throw std::invalid_argument("inv_mod: zero has no inverse");
    return pow_mod(a, q - 2, q);  // Fermat; q prime
}

bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    // This witness set decides primality for every n < 3.3e24, so in
    // particular for the full uint64 range we accept.
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < r - 1; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

uint64_t mult_order(uint64_t s, uint64_t q) {
    if (q < 2) throw std::invalid_argument("mult_order: modulus must be >= 2");
    s %= q;
    if (s == 0) throw std::invalid_argument("mult_order: s is 0 mod q, order undefined");
    uint64_t acc = s;
    uint64_t m = 1;
    while (acc != 1) {
        acc = mul_mod(acc, s, q);
        ++m;
        if (m > q) throw std::invalid_argument("mult_order: s is not invertible mod q");
    }
    return m;
}

QuadClass quadratic_class(uint64_t a, uint64_t q) {
    if (q < 3 || !is_prime(q)) throw std::invalid_argument("quadratic_class: q must be an odd prime");
    a %= q;
    if (a == 0) return QuadClass::Zero;
    uint64_t e = pow_mod(a, (q - 1) / 2, q);
    return e == 1 ? QuadClass::Residue : QuadClass::NonResidue;
}

static void require_quartic_modulus(uint64_t q, const char* fn) {
    if (!is_prime(q)) throw std::invalid_argument(std::string(fn) + ": q must be prime");
    if (q % 4 != 1) throw UnsupportedModulus(std::string(fn) + ": q = " + std::to_string(q) + " is not 1 mod 4");
}

SolutionCount count_quartic_solutions(uint64_t a, uint64_t b, uint64_t c, uint64_t q) {
    require_quartic_modulus(q, "count_quartic_solutions");
    a %= q; b %= q; c %= q;
    if (a == 0 || b == 0 || c == 0)
        throw std::invalid_argument("count_quartic_solutions: a, b, c must be nonzero mod q");

    std::vector<uint64_t> az2(q), bw4(q);
    for (uint64_t z = 0; z < q; ++z) az2[z] = mul_mod(a, mul_mod(z, z, q), q);
    for (uint64_t w = 0; w < q; ++w) {
        uint64_t w2 = mul_mod(w, w, q);
        bw4[w] = mul_mod(b, mul_mod(w2, w2, q), q);
    }

    uint64_t count = 0;
    for (uint64_t z = 0; z < q; ++z) {
        for (uint64_t w = 0; w < q; ++w) {
            uint64_t lhs = az2[z] + q - bw4[w];
            if (lhs >= q) lhs -= q;
            if (lhs == c) ++count;
        }
    }

    // |N - q| < 3 sqrt(q)  <=>  (N - q)^2 < 9q, exact in integers.
    int64_t diff = static_cast<int64_t>(count) - static_cast<int64_t>(q);
    bool ok = static_cast<__int128>(diff) * diff < static_cast<__int128>(9) * q;
    return SolutionCount{count, 3.0 * std::sqrt(static_cast<double>(q)), ok};
}

BiquarticClasses biquartic_residue_classes(uint64_t b, uint64_t c, uint64_t q) {
    require_quartic_modulus(q, "biquartic_residue_classes");
    if (q < 13) throw UnsupportedModulus("biquartic_residue_classes: q must be >= 13");
    b %= q; c %= q;
    if (b == 0 || c == 0)
        throw std::invalid_argument("biquartic_residue_classes: b and c must be nonzero mod q");

    BiquarticClasses out{false, false};
    for (uint64_t w = 1; w < q; ++w) {
        uint64_t w2 = mul_mod(w, w, q);
        uint64_t v = (c + mul_mod(b, mul_mod(w2, w2, q), q)) % q;
        switch (quadratic_class(v, q)) {
            case QuadClass::Residue: out.has_residue = true; break;
            case QuadClass::NonResidue: out.has_nonresidue = true; break;
            case QuadClass::Zero: break;
        }
        if (out.has_residue && out.has_nonresidue) break;
    }
    return out;
}

}  // namespace zsm::numtheory
