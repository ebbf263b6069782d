// Exhaustive search over product-one free sequences: enumeration at a fixed
// length, Davenport constants, and classification of the extremal sequences
// against the q-1 + coset pattern (Form II below).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zsm/seqengine.hpp"

namespace zsm::extremal {

struct SearchStats {
    uint64_t nodes = 0;             // candidate extensions examined
    uint64_t pruned = 0;            // extensions rejected (non-free or non-canonical)
    double seconds = 0.0;
    uint64_t shift_parts = 0;       // minimal parts run through the rotation checks
    uint64_t shift_violations = 0;  // rotations not in H or not pairwise distinct
    uint64_t rbound_violations = 0; // |R| below min(q, sum |A_j|)
};

struct SearchOpts {
    bool symmetry = false;        // orbit-reduced enumeration under Aut(G)
    int jobs = 1;                 // worker threads; results are identical for any value
    int max_len = -1;             // davenport search cap; -1 picks the default
    uint64_t node_budget = 0;     // 0 = unlimited; requires jobs == 1 when set
    size_t state_budget = seqengine::kDefaultStateBudget;
    uint64_t emit_limit = 0;      // 0 = unlimited; enumeration stops after this many emissions
    std::string checkpoint_path;  // persist/resume shard progress here when nonempty
    int checkpoint_stride = 8;    // completed shards between checkpoint writes
};

// Raised when a node budget runs out; the checkpoint (if a path was given)
// has already been persisted and is echoed here.
struct PartialResultError : std::runtime_error {
    std::string checkpoint;  // serialized cursor
    bool persisted;
    PartialResultError(std::string cp, bool saved)
        : std::runtime_error(saved ? "node budget exhausted; resumable cursor saved"
                                   : "node budget exhausted; no checkpoint path, progress discarded"),
          checkpoint(std::move(cp)), persisted(saved) {}
};

struct Emission {
    std::vector<uint32_t> elements;  // sorted element indices
    uint64_t orbit = 1;              // orbit size under Aut(G); 1 when symmetry is off
};

struct EnumResult {
    std::vector<Emission> sequences;  // lexicographic by sorted element indices
    SearchStats stats;
};

// All product-one free multisets of the given length, in lexicographic
// order of their sorted element-index vectors.  With symmetry on, one
// canonical (lex-least) representative per Aut(G)-orbit plus orbit size.
// Group order must be <= 64 and length <= 32.
EnumResult enumerate_free(seqengine::ContextPtr ctx, int length, const SearchOpts& opts = {});

struct DavenportResult {
    int constant;                    // smallest d forcing a product-one subsequence
    std::vector<uint32_t> example;   // a free sequence of length constant-1 (re-verified)
    int searched_max_len;
    bool bound_limited;              // search cap cut below the structural limit
    SearchStats stats;
};

// Computed as 1 + (longest free length), searching up to min(default cap,
// |G|-1); the m+q+2 default for metacyclic groups leaves slack above the
// expected m+q-1 so a longer free sequence would be detected, not hidden.
DavenportResult davenport(seqengine::ContextPtr ctx, const SearchOpts& opts = {});

// Extremal pattern: q-1 copies of y^t plus m-1 elements of one coset
// x^i H with gcd(i, m) = 1.
struct FormII {
    uint32_t t = 0;               // exponent of the repeated H element
    uint32_t i = 0;               // coset index, gcd(i, m) = 1
    std::vector<uint32_t> nu;     // y-exponents of the coset elements, sorted
};

// Matches sequences of length exactly m+q-2; throws std::invalid_argument
// on other lengths, returns nothing when the pattern does not match.
std::optional<FormII> match_form_ii(const seqengine::Sequence& s);

// (q-1) * phi(m) * C(q+m-2, m-1): the number of Form II multisets.
uint64_t form_ii_expected_count(uint32_t q, uint32_t m);

inline constexpr const char* kVerdictHolds = "THEOREM_HOLDS";
inline constexpr const char* kVerdictCounterexample23 = "COUNTEREXAMPLE_CASE_2_3";
inline constexpr const char* kVerdictFalsified = "FALSIFIED";

struct ClassificationReport {
    groups::GroupParams params;
    int length = 0;                      // m+q-2
    uint64_t free_count = 0;
    uint64_t matched_count = 0;
    uint64_t expected_count = 0;
    std::vector<std::string> unmatched;  // non-Form-II free sequences, sorted
    std::string verdict;
    SearchStats stats;
};

// Enumerates all free sequences of length m+q-2, matches them against
// Form II, and also checks the converse (every Form II multiset shows up
// as free).  Verdict is THEOREM_HOLDS / COUNTEREXAMPLE_CASE_2_3 (for
// (m,q) = (2,3), whose single extra sequence is pinned) / FALSIFIED.
ClassificationReport verify_main_theorem(seqengine::ContextPtr ctx, const SearchOpts& opts = {});

struct CyclicCheckResult {
    bool holds = true;
    uint64_t sequences_checked = 0;
    std::string counterexample;  // empty when holds
};

// Over C_n at length L ((n+1)/2 <= L <= n-1, 3 <= n <= 16): every free
// sequence has an element of multiplicity >= 2L-n+1, and at L = n-1 every
// free sequence is g^(n-1) for a generator g.
CyclicCheckResult cyclic_structure_check(uint32_t n, uint32_t length, const SearchOpts& opts = {});

}  // namespace zsm::extremal
