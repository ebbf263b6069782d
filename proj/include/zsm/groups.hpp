// Metacyclic groups C_q x| C_m presented as <x, y | x^m, y^q, yx = x y^s>,
// elements in the normal form x^i y^j, plus generic Cayley-table groups.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zsm::groups {

struct ParseError : std::invalid_argument {
    size_t pos;  // byte offset into the input text
    ParseError(const std::string& what, size_t p) : std::invalid_argument(what), pos(p) {}
};

// Validated presentation parameters: q prime, m >= 2, m | q-1, ord_q(s) = m.
struct GroupParams {
    uint32_t q = 0;
    uint32_t m = 0;
    uint32_t s = 0;  // stored reduced mod q

    uint32_t order() const { return q * m; }
    bool operator==(const GroupParams&) const = default;
};

// Element x^i y^j with 0 <= i < m, 0 <= j < q.
struct Element {
    uint32_t i = 0;
    uint32_t j = 0;
    bool operator==(const Element&) const = default;
};

// Validates the triple and returns it with s reduced; throws
// std::invalid_argument with a reason naming the failing condition.
GroupParams make_group(uint64_t q, uint64_t m, uint64_t s);

Element multiply(const Element& a, const Element& b, const GroupParams& g);
Element inverse(const Element& a, const GroupParams& g);
uint32_t element_order(const Element& a, const GroupParams& g);

// Canonical element index used everywhere downstream: idx = i*q + j,
// so the identity is index 0 and H = <y> occupies indices 0..q-1.
inline uint32_t element_index(const Element& a, const GroupParams& g) { return a.i * g.q + a.j; }
inline Element element_at(uint32_t idx, const GroupParams& g) { return Element{idx / g.q, idx % g.q}; }

// Grammar:  element := "1" | part | part "*" part
//           part    := ("x" | "y") ["^" integer]
// Integers may be negative and are reduced mod m (x) or mod q (y).
// Mixed or out-of-order parts are normalized by group multiplication.
Element parse_element(const std::string& text, const GroupParams& g);
std::string format_element(const Element& a, const GroupParams& g);

// Dense multiplication table.  Identity must sit at index 0; to_cayley and
// cyclic_group guarantee that, load_cayley enforces it.
struct CayleyGroup {
    uint32_t n = 0;
    std::vector<uint16_t> table;  // n*n, row-major: table[a*n+b] = a*b
    std::vector<uint16_t> inv;    // n
    std::optional<GroupParams> meta;  // set when built from a metacyclic presentation

    uint16_t mul(uint32_t a, uint32_t b) const { return table[a * n + b]; }
};

inline constexpr uint32_t kCayleyCap = 256;

CayleyGroup to_cayley(const GroupParams& g, uint32_t cap = kCayleyCap);
CayleyGroup cyclic_group(uint32_t n);

// Text format: first line n, then n rows of n 0-based indices.
// Validates identity-at-0, inverses, Latin-square rows/columns, and
// associativity (exhaustive for n <= 64, sampled above).
CayleyGroup load_cayley(std::istream& in);
CayleyGroup load_cayley_file(const std::string& path);

// All automorphisms as permutations of element indices; group order must
// be <= 64.  Brute force over generator images: (x, y) candidates filtered
// by the defining relations when metacyclic metadata is present, a greedy
// generating set otherwise.  Every candidate map is checked to be a
// bijective homomorphism.
std::vector<std::vector<uint16_t>> automorphisms(const CayleyGroup& c, uint32_t max_count = 1u << 20);

}  // namespace zsm::groups
