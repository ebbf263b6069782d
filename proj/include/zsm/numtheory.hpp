// Modular arithmetic over small primes: primality, multiplicative orders,
// quadratic residue classes, and exact solution counts for az^2 - bw^4 = c.
#pragma once

#include <cstdint>
#include <stdexcept>

namespace zsm::numtheory {

// Thrown when a modulus fails a structural requirement (e.g. q != 1 mod 4)
// rather than a plain range/argument check.
struct UnsupportedModulus : std::runtime_error {
    explicit UnsupportedModulus(const std::string& what) : std::runtime_error(what) {}
};

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t mod);
uint64_t inv_mod(uint64_t a, uint64_t q);  // q prime, a != 0 mod q

// Deterministic Miller-Rabin, valid for all n < 2^63.
bool is_prime(uint64_t n);

// Least m >= 1 with s^m = 1 (mod q).  Throws std::invalid_argument if
// s = 0 (mod q) or gcd-type failure makes the order undefined.
uint64_t mult_order(uint64_t s, uint64_t q);

enum class QuadClass { Zero, Residue, NonResidue };

// Euler criterion; q must be an odd prime.
QuadClass quadratic_class(uint64_t a, uint64_t q);

struct SolutionCount {
    uint64_t count;      // N = #{(z,w) in Z_q^2 : a z^2 - b w^4 = c}
    double bound;        // 3 sqrt(q)
    bool within_bound;   // |N - q| < 3 sqrt(q), decided in exact integer arithmetic
};

// Direct enumeration over all (z, w) pairs; q prime, q = 1 (mod 4),
// a, b, c all nonzero mod q.
SolutionCount count_quartic_solutions(uint64_t a, uint64_t b, uint64_t c, uint64_t q);

struct BiquarticClasses {
    bool has_residue;     // some w != 0 gives c + b w^4 a nonzero square
    bool has_nonresidue;  // some w != 0 gives c + b w^4 a nonsquare
};

// Scans {c + b w^4 : w in Z_q^*}; q prime, q = 1 (mod 4), q >= 13, b,c != 0.
BiquarticClasses biquartic_residue_classes(uint64_t b, uint64_t c, uint64_t q);

}  // namespace zsm::numtheory
