// Product-one machinery for sequences (multisets) over a finite group:
// achievable ordered-product sets per sub-multiset, freeness with witnesses,
// shift products, and the H-part decomposition for metacyclic groups.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zsm/groups.hpp"

namespace zsm::seqengine {

// Default cap on DP storage, counted in 64-bit set words.
inline constexpr size_t kDefaultStateBudget = size_t{1} << 26;

// Largest group order the bitset engine handles (one word per product set).
inline constexpr uint32_t kEngineOrderCap = 64;

struct ResourceError : std::runtime_error {
    size_t attempted_words;
    size_t budget_words;
    ResourceError(size_t attempted, size_t budget)
        : std::runtime_error("state budget exceeded: need " + std::to_string(attempted) +
                             " set words, budget is " + std::to_string(budget)),
          attempted_words(attempted), budget_words(budget) {}
};

// Immutable per-group data shared by sequences and searches: the Cayley
// table in column-major layout for fast right multiplication, inverses,
// x-exponents for coset bookkeeping, and element names.
class Context {
public:
    explicit Context(groups::CayleyGroup g);

    uint32_t order() const { return n_; }
    uint32_t mul(uint32_t a, uint32_t b) const { return table_[static_cast<size_t>(a) * n_ + b]; }
    uint32_t inv(uint32_t a) const { return inv_[a]; }
    // Column b of the multiplication table: col[h] = h * b.
    const uint16_t* rmul_col(uint32_t b) const { return &cols_[static_cast<size_t>(b) * n_]; }

    bool metacyclic() const { return meta_.has_value(); }
    const groups::GroupParams& params() const;
    // x-exponent of an element (0 for every element when not metacyclic).
    uint32_t xexp(uint32_t e) const { return xexp_[e]; }
    bool in_H(uint32_t e) const { return xexp_[e] == 0; }

    std::string element_name(uint32_t e) const;
    uint32_t parse_element(const std::string& text) const;  // metacyclic only

    const groups::CayleyGroup& cayley() const { return cayley_; }

private:
    groups::CayleyGroup cayley_;
    uint32_t n_;
    std::vector<uint16_t> table_;  // row-major copy
    std::vector<uint16_t> cols_;   // column-major copy
    std::vector<uint16_t> inv_;
    std::vector<uint8_t> xexp_;
    std::optional<groups::GroupParams> meta_;
};

using ContextPtr = std::shared_ptr<const Context>;

ContextPtr make_context(groups::CayleyGroup g);
ContextPtr make_context(const groups::GroupParams& g);

// A multiset of group elements, stored as (element index, multiplicity)
// entries sorted by element index.
class Sequence {
public:
    Sequence() = default;
    Sequence(ContextPtr ctx, const std::vector<uint32_t>& elements);

    static Sequence parse(ContextPtr ctx, const std::string& text);  // comma-separated elements

    const ContextPtr& context() const { return ctx_; }
    const std::vector<std::pair<uint32_t, uint32_t>>& entries() const { return entries_; }
    uint32_t size() const { return total_; }
    uint32_t multiplicity(uint32_t element) const;

    // Expanded element list in canonical (index) order.
    std::vector<uint32_t> expanded() const;
    std::string to_string() const;

    bool operator==(const Sequence& other) const { return entries_ == other.entries_; }

private:
    ContextPtr ctx_;
    std::vector<std::pair<uint32_t, uint32_t>> entries_;
    uint32_t total_ = 0;
};

// Incremental achievable-set table.  A state is a count vector over the
// distinct elements appended so far; its value is the set of products of
// all orderings of that sub-multiset, as a bit set over element indices.
// Appends must arrive in nondecreasing element order; only the newest
// distinct element's multiplicity ever grows, so earlier strides stay
// valid and each append writes one new slab of states.
class ProductDP {
public:
    ProductDP(const Context& ctx, size_t budget_words = kDefaultStateBudget);

    // Extends by one copy of e and scans only the new states for the
    // identity.  Returns false (and rolls the append back) if some new
    // sub-multiset reaches the identity, i.e. the sequence stops being
    // product-one free.
    bool append_check(uint32_t e);

    // Extends unconditionally (used to materialize full tables).
    void append(uint32_t e);

    void pop();  // undo the most recent append

    size_t state_count() const { return table_.size(); }
    uint64_t state(size_t idx) const { return table_[idx]; }

    struct Level {
        uint32_t elem;
        uint32_t count;
        size_t stride;
    };
    const std::vector<Level>& levels() const { return levels_; }

    // Index into the state table for a count vector aligned with levels().
    size_t state_index(std::span<const uint32_t> counts) const;
    // Count vector for a state index, aligned with levels().
    std::vector<uint32_t> counts_at(size_t idx) const;

private:
    bool extend(uint32_t e, bool check_identity);

    const Context* ctx_;
    size_t budget_;
    std::vector<uint64_t> table_;
    std::vector<Level> levels_;
    struct Mark {
        size_t old_size;
        bool new_level;
    };
    std::vector<Mark> marks_;
};

// Full achievable-products table for a sequence.
class AchievableTable {
public:
    AchievableTable(const Sequence& s, size_t budget_words = kDefaultStateBudget);

    // Product set of the sub-multiset given by counts (aligned with the
    // sequence's entries); the empty vector yields {identity}.
    uint64_t products(std::span<const uint32_t> counts) const;
    std::vector<uint32_t> product_elements(std::span<const uint32_t> counts) const;

    const Sequence& sequence() const { return seq_; }
    const ProductDP& dp() const { return dp_; }

private:
    Sequence seq_;
    ProductDP dp_;
};

struct Witness {
    std::vector<uint32_t> ordered;  // element indices whose left-to-right product is the identity
};

struct FreeResult {
    bool free;
    std::optional<Witness> witness;  // present iff !free, re-verified by direct multiplication
};

FreeResult is_product1_free(const Sequence& s, size_t budget_words = kDefaultStateBudget);

// pi_n for n = 0..l-1, where pi_n = a_{n+1} ... a_l a_1 ... a_n.
std::vector<uint32_t> shift_products(const Context& ctx, std::span<const uint32_t> ordered);

// Smallest sub-multiset of T (all elements outside H) whose x-exponents
// sum to 0 mod m, i.e. whose products land in H; ties broken by canonical
// element order.  Such a part has no proper sub-multiset reaching H, and
// 2 <= |A| <= m whenever one exists.  Returns nothing iff none exists.
std::optional<Sequence> minimal_H_part(const Sequence& t);

struct HDecomposition {
    std::vector<Sequence> parts;      // A_1 .. A_r, in extraction order
    Sequence residual;                // C, at most m-1 elements
    std::vector<uint32_t> r_set;      // R as sorted element indices, all in H
    bool shift_ok = true;             // every part's rotations in H and pairwise distinct
    bool rbound_ok = true;            // |R| >= min(q, sum |A_j|)
    uint32_t parts_size_sum = 0;
};

// Greedy extraction of minimal parts from the N-part of s until fewer than
// m elements remain, then R = P(A_1) * ({1} u P(A_2)) * ... * ({1} u P(A_r))
// where P(A) is the set of shift products of A in canonical order.
HDecomposition decompose(const Sequence& s);

}  // namespace zsm::seqengine
