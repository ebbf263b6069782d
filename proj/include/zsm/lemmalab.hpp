// Additive-combinatorics checks over Z_q: sumsets, Cauchy-Davenport,
// Vosper's critical-pair classification, interval invariance under
// multiplication, coefficient-swap distinctness, and the permutation-sum
// corollaries.  Everything here is exact and exhaustive at the sizes the
// command line exposes; falsification is reported as data, never asserted.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zsm::lemmalab {

// Largest modulus a ResidueSet can hold (one bit per residue class).
inline constexpr uint32_t kResidueCap = 128;

class ResidueSet {
public:
    explicit ResidueSet(uint32_t modulus);
    ResidueSet(uint32_t modulus, std::initializer_list<uint32_t> elems);
    static ResidueSet all(uint32_t modulus);

    uint32_t modulus() const { return q_; }
    uint32_t size() const;
    bool empty() const { return bits_ == 0; }
    bool contains(uint32_t r) const { return (bits_ >> (r % q_)) & 1; }
    void insert(uint32_t r) { bits_ |= static_cast<unsigned __int128>(1) << (r % q_); }

    std::vector<uint32_t> elements() const;
    std::string to_string() const;  // "{0,2,3}"

    ResidueSet& unite(const ResidueSet& o);   // in-place union; moduli must agree
    ResidueSet complement() const;
    ResidueSet negated() const;               // {-a : a in S}
    ResidueSet translated(uint32_t t) const;  // {a + t : a in S}
    ResidueSet scaled(uint32_t f) const;      // {f*a : a in S}

    bool operator==(const ResidueSet& o) const { return q_ == o.q_ && bits_ == o.bits_; }

private:
    uint32_t q_;
    unsigned __int128 bits_ = 0;
};

// Exact sumset {a + b : a in X, b in Y}; moduli must agree.
ResidueSet sumset(const ResidueSet& x, const ResidueSet& y);

// |X_1 + ... + X_r| >= min(q, |X_1| + ... + |X_r| - r + 1).  The modulus
// must be prime (the inequality needs it) and every set nonempty.
bool cauchy_davenport_check(const std::vector<ResidueSet>& sets);

// Classification of |X + Y| = min(q, |X| + |Y| - 1): the equality flag is
// computed independently of the four structural conditions, so the
// equality <-> (a|b|c|d) equivalence stays a testable claim rather than an
// assumption.  Condition (d) treats sets of size <= 2 (and the full set)
// as arithmetic progressions with every compatible difference.
struct VosperVerdict {
    bool equality = false;
    bool cond_a = false;  // |X| + |Y| > q
    bool cond_b = false;  // min size is 1
    bool cond_c = false;  // |X+Y| = q-1 and Y is the complement of c - X
    bool cond_d = false;  // arithmetic progressions with a common difference
    std::optional<uint32_t> c_witness;     // the single element missing from X+Y
    std::optional<uint32_t> d_difference;  // smallest shared common difference
    bool consistent() const { return equality == (cond_a || cond_b || cond_c || cond_d); }
};

VosperVerdict vosper_classify(const ResidueSet& x, const ResidueSet& y);

// Shared result shape for the exhaustive sweeps: how many instances ran,
// how many falsified the claim under test, and the first offender.
struct SweepReport {
    uint64_t cases = 0;
    uint64_t violations = 0;
    std::string first_violation;
};

// Every ordered pair of nonempty subsets of Z_q (prime q <= 16); a
// violation is a pair where the equality flag disagrees with (a|b|c|d).
SweepReport vosper_exhaustive(uint32_t q);

// For A = {1..k-1}, B = {k..q-1}: the smallest element of A (then of B)
// that multiplication by s moves to the other side.  At least one side
// must leak; a nullopt return is the falsification signal.
std::optional<uint32_t> interval_invariance_counterexample(uint32_t q, uint32_t s, uint32_t k);

// All primes 5 <= q <= q_max, all s in [2, q-1], all k in [2, q-1].
SweepReport interval_invariance_sweep(uint32_t q_max);

// sum a_k s^k != a_i s^j + a_j s^i + sum_{k != i,j} a_k s^k (mod q),
// given a_i != a_j and ord_q(s) = len(a).  Hypothesis violations are
// invalid-argument errors; the return value is the comparison itself.
bool coefficient_swap_distinct(const std::vector<uint32_t>& a, uint32_t s, uint32_t q,
                               uint32_t i, uint32_t j);

// Permutation sums sum a_{sigma(k)} s^k over all distinct arrangements of
// the coefficients.  Requires q = 1 (mod 4), q >= 13, ord_q(s) = (q-1)/2,
// |a| = (q-1)/2, and two distinct values among both the even-position and
// odd-position coefficients.
ResidueSet perm_sum_set(const std::vector<uint32_t>& a, uint32_t s, uint32_t q);

// Split variant for ord_q(s) = q-1 and |a| = q-1: arrangements of the
// even positions against weights s^0, s^2, ... and of the odd positions
// against s^1, s^3, ...; each residue class of positions mod 4 must carry
// two distinct coefficient values.
std::pair<ResidueSet, ResidueSet> split_perm_sum_sets(const std::vector<uint32_t>& a, uint32_t s,
                                                      uint32_t q);

// Random hypothesis-satisfying coefficient tuples (fixed seed), checking
// |A| >= q-1 (order (q-1)/2) or both split sizes >= q-1 (order q-1).
SweepReport perm_sum_trials(uint32_t q, uint32_t s, uint64_t count, uint64_t seed);

// (N - q)^2 < 9q for the solution counts of a z^2 - b w^4 = c, over all
// primes q = 1 (mod 4) up to q_max and all nonzero a, b, c.  Counts come
// from per-(a,b) histograms, spot-checked against the direct counter.
SweepReport quartic_bound_sweep(uint32_t q_max);

// {c + b w^4 : w != 0} meets both quadratic-residue classes for every
// listed prime (each must be 1 mod 4 and >= 13) and all nonzero b, c.
SweepReport biquartic_class_sweep(const std::vector<uint32_t>& qs);

}  // namespace zsm::lemmalab
