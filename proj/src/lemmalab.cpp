#include "zsm/lemmalab.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>

#include "zsm/numtheory.hpp"

namespace zsm::lemmalab {

namespace {

using u128 = unsigned __int128;

constexpr u128 kOne = 1;

u128 mask_of(uint32_t q) {
    return q == 128 ? ~static_cast<u128>(0) : (kOne << q) - 1;
}

uint32_t popcount128(u128 v) {
    return std::popcount(static_cast<uint64_t>(v)) + std::popcount(static_cast<uint64_t>(v >> 64));
}

void require_prime(uint32_t q, const char* who) {
    if (!numtheory::is_prime(q))
        throw std::invalid_argument(std::string(who) + ": modulus must be prime");
}

std::string set_string(const std::vector<uint32_t>& elems) {
    std::ostringstream os;
    os << '{';
    for (size_t k = 0; k < elems.size(); ++k) {
        if (k > 0) os << ',';
        os << elems[k];
    }
    os << '}';
    return os.str();
}

bool two_distinct(const std::vector<uint32_t>& v, uint32_t q) {
    for (size_t k = 1; k < v.size(); ++k)
        if (v[k] % q != v[0] % q) return true;
    return false;
}

// Sums of every distinct arrangement of the coefficients against the fixed
// weight vector.  next_permutation over the sorted list walks each distinct
// arrangement exactly once, which keeps repeated coefficients cheap.
ResidueSet arrangement_sums(std::vector<uint32_t> coeffs, const std::vector<uint32_t>& weights,
                            uint32_t q) {
    std::sort(coeffs.begin(), coeffs.end());
    ResidueSet out(q);
    do {
        uint64_t acc = 0;
        for (size_t k = 0; k < coeffs.size(); ++k)
            acc += static_cast<uint64_t>(coeffs[k]) * weights[k] % q;
        out.insert(static_cast<uint32_t>(acc % q));
    } while (std::next_permutation(coeffs.begin(), coeffs.end()));
    return out;
}

}  // namespace

ResidueSet::ResidueSet(uint32_t modulus) : q_(modulus) {
    if (modulus < 2 || modulus > kResidueCap)
        throw std::invalid_argument("ResidueSet: modulus must be in [2, " +
                                    std::to_string(kResidueCap) + "]");
}

ResidueSet::ResidueSet(uint32_t modulus, std::initializer_list<uint32_t> elems)
    : ResidueSet(modulus) {
    for (uint32_t e : elems) insert(e);
}

ResidueSet ResidueSet::all(uint32_t modulus) {
    ResidueSet s(modulus);
    s.bits_ = mask_of(modulus);
    return s;
}

uint32_t ResidueSet::size() const { return popcount128(bits_); }

std::vector<uint32_t> ResidueSet::elements() const {
    std::vector<uint32_t> out;
    out.reserve(size());
    for (uint32_t r = 0; r < q_; ++r)
        if ((bits_ >> r) & 1) out.push_back(r);
    return out;
}

std::string ResidueSet::to_string() const { return set_string(elements()); }

ResidueSet& ResidueSet::unite(const ResidueSet& o) {
    if (q_ != o.q_) throw std::invalid_argument("ResidueSet::unite: modulus mismatch");
    bits_ |= o.bits_;
    return *this;
}

ResidueSet ResidueSet::complement() const {
    ResidueSet s(q_);
    s.bits_ = ~bits_ & mask_of(q_);
    return s;
}

ResidueSet ResidueSet::negated() const {
    ResidueSet s(q_);
    for (uint32_t r = 0; r < q_; ++r)
        if ((bits_ >> r) & 1) s.insert((q_ - r) % q_);
    return s;
}

ResidueSet ResidueSet::translated(uint32_t t) const {
    t %= q_;
    ResidueSet s(q_);
    s.bits_ = t == 0 ? bits_ : ((bits_ << t) | (bits_ >> (q_ - t))) & mask_of(q_);
    return s;
}

ResidueSet ResidueSet::scaled(uint32_t f) const {
    ResidueSet s(q_);
    for (uint32_t r = 0; r < q_; ++r)
        if ((bits_ >> r) & 1) s.insert(static_cast<uint32_t>(static_cast<uint64_t>(r) * f % q_));
    return s;
}

ResidueSet sumset(const ResidueSet& x, const ResidueSet& y) {
    if (x.modulus() != y.modulus()) throw std::invalid_argument("sumset: modulus mismatch");
    ResidueSet acc(x.modulus());
    for (uint32_t a : x.elements()) acc.unite(y.translated(a));
    return acc;
}

bool cauchy_davenport_check(const std::vector<ResidueSet>& sets) {
    if (sets.empty()) throw std::invalid_argument("cauchy_davenport_check: need at least one set");
    const uint32_t q = sets.front().modulus();
    require_prime(q, "cauchy_davenport_check");
    uint64_t total = 0;
    for (const auto& s : sets) {
        if (s.modulus() != q) throw std::invalid_argument("cauchy_davenport_check: modulus mismatch");
        if (s.empty()) throw std::invalid_argument("cauchy_davenport_check: sets must be nonempty");
        total += s.size();
    }
    ResidueSet acc = sets.front();
    for (size_t k = 1; k < sets.size(); ++k) acc = sumset(acc, sets[k]);
    return acc.size() >= std::min<uint64_t>(q, total - sets.size() + 1);
}

namespace {

// A set is circularly contiguous iff its indicator has at most one 1->0
// step around the cycle; d is a valid common difference exactly when
// d^{-1} * S is such an interval.
bool circular_interval(const ResidueSet& s) {
    if (s.empty()) return false;
    const uint32_t q = s.modulus();
    uint32_t steps = 0;
    for (uint32_t j = 0; j < q; ++j)
        if (s.contains(j) && !s.contains((j + 1) % q)) ++steps;
    return steps <= 1;
}

u128 ap_difference_mask(const ResidueSet& s) {
    const uint32_t q = s.modulus();
    u128 out = 0;
    for (uint32_t d = 1; d < q; ++d) {
        const auto dinv = static_cast<uint32_t>(numtheory::inv_mod(d, q));
        if (circular_interval(s.scaled(dinv))) out |= kOne << d;
    }
    return out;
}

}  // namespace

VosperVerdict vosper_classify(const ResidueSet& x, const ResidueSet& y) {
    if (x.modulus() != y.modulus()) throw std::invalid_argument("vosper_classify: modulus mismatch");
    const uint32_t q = x.modulus();
    require_prime(q, "vosper_classify");
    if (x.empty() || y.empty())
        throw std::invalid_argument("vosper_classify: sets must be nonempty");

    VosperVerdict v;
    const ResidueSet z = sumset(x, y);
    v.equality = z.size() == std::min<uint32_t>(q, x.size() + y.size() - 1);
    v.cond_a = x.size() + y.size() > q;
    v.cond_b = std::min(x.size(), y.size()) == 1;
    if (z.size() == q - 1) {
        const uint32_t c = z.complement().elements().front();
        if (y == x.negated().translated(c).complement()) {
            v.cond_c = true;
            v.c_witness = c;
        }
    }
    const u128 common = ap_difference_mask(x) & ap_difference_mask(y);
    if (common != 0) {
        uint32_t d = 0;
        while (((common >> d) & 1) == 0) ++d;
        v.cond_d = true;
        v.d_difference = d;
    }
    return v;
}

SweepReport vosper_exhaustive(uint32_t q) {
    if (q < 3 || q > 16) throw std::invalid_argument("vosper_exhaustive: q must be in [3, 16]");
    require_prime(q, "vosper_exhaustive");
    const uint32_t full = (1u << q) - 1;

    auto rotl = [q, full](uint32_t v, uint32_t sh) {
        return sh == 0 ? v : ((v << sh) | (v >> (q - sh))) & full;
    };
    auto mask_elems = [q](uint32_t m) {
        std::vector<uint32_t> out;
        for (uint32_t e = 0; e < q; ++e)
            if ((m >> e) & 1) out.push_back(e);
        return out;
    };

    // Per-subset difference masks, bit d set when the subset is an
    // arithmetic progression of difference d (interval test as above).
    std::vector<uint32_t> invmul(static_cast<size_t>(q) * q);
    for (uint32_t d = 1; d < q; ++d) {
        const auto dinv = static_cast<uint32_t>(numtheory::inv_mod(d, q));
        for (uint32_t e = 0; e < q; ++e) invmul[d * q + e] = dinv * e % q;
    }
    std::vector<uint16_t> apmask(full + 1u, 0);
    for (uint32_t m = 1; m <= full; ++m) {
        for (uint32_t d = 1; d < q; ++d) {
            uint32_t t = 0;
            for (uint32_t e = 0; e < q; ++e)
                if ((m >> e) & 1) t |= 1u << invmul[d * q + e];
            const uint32_t next = rotl(t, q - 1);  // bit j holds t[(j+1) mod q]
            if (std::popcount(t & ~next & full) <= 1) apmask[m] |= uint16_t{1} << d;
        }
    }
    std::vector<uint8_t> pop(full + 1u);
    for (uint32_t m = 0; m <= full; ++m) pop[m] = static_cast<uint8_t>(std::popcount(m));

    SweepReport rep;
    for (uint32_t xm = 1; xm <= full; ++xm) {
        const auto xe = mask_elems(xm);
        uint32_t xneg = 0;
        for (uint32_t e : xe) xneg |= 1u << ((q - e) % q);
        const uint32_t px = pop[xm];
        for (uint32_t ym = 1; ym <= full; ++ym) {
            uint32_t zm = 0;
            for (uint32_t a : xe) zm |= rotl(ym, a);
            const uint32_t py = pop[ym];
            const uint32_t pz = pop[zm];
            const bool equality = pz == std::min(q, px + py - 1);
            const bool ca = px + py > q;
            const bool cb = px == 1 || py == 1;
            bool cc = false;
            if (pz == q - 1) {
                const auto c = static_cast<uint32_t>(std::countr_zero(~zm & full));
                cc = ym == (~rotl(xneg, c) & full);
            }
            const bool cd = (apmask[xm] & apmask[ym]) != 0;
            ++rep.cases;
            if (equality != (ca || cb || cc || cd)) {
                ++rep.violations;
                if (rep.first_violation.empty())
                    rep.first_violation = "q=" + std::to_string(q) + " X=" + set_string(xe) +
                                          " Y=" + set_string(mask_elems(ym));
            }
            // Sparse deterministic sample re-checked against the reference
            // classifier, so the bit-twiddled fast path cannot drift.
            if ((static_cast<uint64_t>(xm) * 2654435761ull ^ ym) % 4099 == 0) {
                ResidueSet rx(q), ry(q);
                for (uint32_t e : xe) rx.insert(e);
                for (uint32_t e : mask_elems(ym)) ry.insert(e);
                const VosperVerdict ref = vosper_classify(rx, ry);
                if (ref.equality != equality || ref.cond_a != ca || ref.cond_b != cb ||
                    ref.cond_c != cc || ref.cond_d != cd)
                    throw std::logic_error("vosper_exhaustive: fast path disagrees with the "
                                           "classifier at X=" +
                                           set_string(xe) + " Y=" + set_string(mask_elems(ym)));
            }
        }
    }
    return rep;
}

std::optional<uint32_t> interval_invariance_counterexample(uint32_t q, uint32_t s, uint32_t k) {
    if (q < 5 || !numtheory::is_prime(q))
        throw std::invalid_argument("interval_invariance_counterexample: q must be a prime >= 5");
    const uint32_t sm = s % q;
    if (sm < 2)
        throw std::invalid_argument("interval_invariance_counterexample: s must be in [2, q-1]");
    if (k < 2 || k > q - 1)
        throw std::invalid_argument("interval_invariance_counterexample: k must be in [2, q-1]");
    for (uint32_t a = 1; a < k; ++a)
        if (a * sm % q >= k || a * sm % q == 0) return a;
    for (uint32_t b = k; b < q; ++b)
        if (b * sm % q < k) return b;
    return std::nullopt;
}

SweepReport interval_invariance_sweep(uint32_t q_max) {
    SweepReport rep;
    for (uint32_t q = 5; q <= q_max; ++q) {
        if (!numtheory::is_prime(q)) continue;
        for (uint32_t s = 2; s < q; ++s)
            for (uint32_t k = 2; k < q; ++k) {
                ++rep.cases;
                if (!interval_invariance_counterexample(q, s, k)) {
                    ++rep.violations;
                    if (rep.first_violation.empty())
                        rep.first_violation = "q=" + std::to_string(q) + " s=" + std::to_string(s) +
                                              " k=" + std::to_string(k);
                }
            }
    }
    return rep;
}

bool coefficient_swap_distinct(const std::vector<uint32_t>& a, uint32_t s, uint32_t q, uint32_t i,
                               uint32_t j) {
    require_prime(q, "coefficient_swap_distinct");
    const auto m = static_cast<uint32_t>(a.size());
    if (m < 2) throw std::invalid_argument("coefficient_swap_distinct: need two coefficients");
    if (i >= m || j >= m || i == j)
        throw std::invalid_argument("coefficient_swap_distinct: bad index pair");
    if (numtheory::mult_order(s, q) != m)
        throw std::invalid_argument(
            "coefficient_swap_distinct: ord_q(s) must equal the coefficient count");
    if (a[i] % q == a[j] % q)
        throw std::invalid_argument("coefficient_swap_distinct: a_i and a_j must differ mod q");

    uint64_t lhs = 0, rhs = 0, w = 1;
    for (uint32_t k = 0; k < m; ++k) {
        uint64_t plain = a[k] % q;
        uint64_t swapped = plain;
        if (k == i)
            swapped = a[j] % q;
        else if (k == j)
            swapped = a[i] % q;
        lhs = (lhs + plain * w) % q;
        rhs = (rhs + swapped * w) % q;
        w = w * (s % q) % q;
    }
    return lhs != rhs;
}

namespace {

void require_perm_sum_modulus(uint32_t q, const char* who) {
    if (!numtheory::is_prime(q) || q % 4 != 1 || q < 13)
        throw std::invalid_argument(std::string(who) +
                                    ": q must be a prime >= 13 with q = 1 (mod 4)");
}

std::vector<uint32_t> power_weights(const std::vector<uint32_t>& positions, uint32_t s,
                                    uint32_t q) {
    std::vector<uint32_t> w;
    w.reserve(positions.size());
    for (uint32_t k : positions)
        w.push_back(static_cast<uint32_t>(numtheory::pow_mod(s % q, k, q)));
    return w;
}

}  // namespace

ResidueSet perm_sum_set(const std::vector<uint32_t>& a, uint32_t s, uint32_t q) {
    require_perm_sum_modulus(q, "perm_sum_set");
    const uint32_t m = (q - 1) / 2;
    if (a.size() != m) throw std::invalid_argument("perm_sum_set: need (q-1)/2 coefficients");
    if (numtheory::mult_order(s, q) != m)
        throw std::invalid_argument("perm_sum_set: ord_q(s) must be (q-1)/2");

    std::vector<uint32_t> even, odd, coeffs, positions;
    for (uint32_t k = 0; k < m; ++k) {
        coeffs.push_back(a[k] % q);
        positions.push_back(k);
        (k % 2 == 0 ? even : odd).push_back(a[k] % q);
    }
    if (!two_distinct(even, q))
        throw std::invalid_argument("perm_sum_set: even-position coefficients need two distinct values");
    if (!two_distinct(odd, q))
        throw std::invalid_argument("perm_sum_set: odd-position coefficients need two distinct values");

    return arrangement_sums(coeffs, power_weights(positions, s, q), q);
}

std::pair<ResidueSet, ResidueSet> split_perm_sum_sets(const std::vector<uint32_t>& a, uint32_t s,
                                                      uint32_t q) {
    require_perm_sum_modulus(q, "split_perm_sum_sets");
    if (a.size() != q - 1) throw std::invalid_argument("split_perm_sum_sets: need q-1 coefficients");
    if (numtheory::mult_order(s, q) != q - 1)
        throw std::invalid_argument("split_perm_sum_sets: s must generate the units mod q");

    for (uint32_t r = 0; r < 4; ++r) {
        std::vector<uint32_t> cls;
        for (uint32_t k = r; k < q - 1; k += 4) cls.push_back(a[k] % q);
        if (!two_distinct(cls, q))
            throw std::invalid_argument("split_perm_sum_sets: position class " + std::to_string(r) +
                                        " (mod 4) needs two distinct values");
    }

    std::vector<uint32_t> even_c, even_p, odd_c, odd_p;
    for (uint32_t k = 0; k < q - 1; ++k) {
        if (k % 2 == 0) {
            even_c.push_back(a[k] % q);
            even_p.push_back(k);
        } else {
            odd_c.push_back(a[k] % q);
            odd_p.push_back(k);
        }
    }
    return {arrangement_sums(even_c, power_weights(even_p, s, q), q),
            arrangement_sums(odd_c, power_weights(odd_p, s, q), q)};
}

SweepReport perm_sum_trials(uint32_t q, uint32_t s, uint64_t count, uint64_t seed) {
    require_perm_sum_modulus(q, "perm_sum_trials");
    const uint64_t ord = numtheory::mult_order(s, q);
    const bool split = ord == q - 1;
    if (!split && ord != (q - 1) / 2)
        throw std::invalid_argument("perm_sum_trials: ord_q(s) must be q-1 or (q-1)/2");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<uint32_t> coeff(0, q - 1);
    const size_t len = split ? q - 1 : (q - 1) / 2;
    std::vector<uint32_t> a(len);

    auto hypothesis_ok = [&]() {
        const uint32_t stride = split ? 4 : 2;
        for (uint32_t r = 0; r < stride; ++r) {
            std::vector<uint32_t> cls;
            for (size_t k = r; k < len; k += stride) cls.push_back(a[k]);
            if (!two_distinct(cls, q)) return false;
        }
        return true;
    };

    SweepReport rep;
    for (uint64_t t = 0; t < count; ++t) {
        do {
            for (auto& v : a) v = coeff(rng);
        } while (!hypothesis_ok());
        ++rep.cases;
        bool good;
        if (split) {
            const auto [se, so] = split_perm_sum_sets(a, s, q);
            good = se.size() >= q - 1 && so.size() >= q - 1;
        } else {
            good = perm_sum_set(a, s, q).size() >= q - 1;
        }
        if (!good) {
            ++rep.violations;
            if (rep.first_violation.empty())
                rep.first_violation = "q=" + std::to_string(q) + " s=" + std::to_string(s) +
                                      " a=" + set_string(a);
        }
    }
    return rep;
}

SweepReport quartic_bound_sweep(uint32_t q_max) {
    SweepReport rep;
    for (uint32_t q = 5; q <= q_max; ++q) {
        if (q % 4 != 1 || !numtheory::is_prime(q)) continue;
        std::vector<uint32_t> sq(q), quart(q), az2(q), bw4(q), hist(q);
        for (uint32_t v = 0; v < q; ++v) sq[v] = static_cast<uint32_t>(static_cast<uint64_t>(v) * v % q);
        for (uint32_t v = 0; v < q; ++v) quart[v] = sq[sq[v]];
        const int64_t nine_q = 9ll * q;
        for (uint32_t a = 1; a < q; ++a) {
            for (uint32_t z = 0; z < q; ++z)
                az2[z] = static_cast<uint32_t>(static_cast<uint64_t>(a) * sq[z] % q);
            for (uint32_t b = 1; b < q; ++b) {
                for (uint32_t w = 0; w < q; ++w)
                    bw4[w] = static_cast<uint32_t>(static_cast<uint64_t>(b) * quart[w] % q);
                std::fill(hist.begin(), hist.end(), 0u);
                for (uint32_t z = 0; z < q; ++z) {
                    const uint32_t lift = az2[z] + q;
                    for (uint32_t w = 0; w < q; ++w) {
                        uint32_t d = lift - bw4[w];
                        if (d >= q) d -= q;
                        ++hist[d];
                    }
                }
                for (uint32_t c = 1; c < q; ++c) {
                    ++rep.cases;
                    const int64_t diff = static_cast<int64_t>(hist[c]) - q;
                    if (diff * diff >= nine_q) {
                        ++rep.violations;
                        if (rep.first_violation.empty())
                            rep.first_violation = "q=" + std::to_string(q) + " a=" + std::to_string(a) +
                                                  " b=" + std::to_string(b) + " c=" + std::to_string(c) +
                                                  " N=" + std::to_string(hist[c]);
                    }
                }
                // One histogram cell per small (a,b) is re-derived with the
                // direct pair counter to keep the two paths honest.
                if (a <= 2 && b <= 2 &&
                    numtheory::count_quartic_solutions(a, b, 1, q).count != hist[1])
                    throw std::logic_error("quartic_bound_sweep: histogram disagrees with the "
                                           "direct count at q=" + std::to_string(q));
            }
        }
    }
    return rep;
}

SweepReport biquartic_class_sweep(const std::vector<uint32_t>& qs) {
    SweepReport rep;
    for (uint32_t q : qs) {
        if (!numtheory::is_prime(q) || q % 4 != 1 || q < 13)
            throw std::invalid_argument(
                "biquartic_class_sweep: q must be a prime >= 13 with q = 1 (mod 4)");
        for (uint32_t b = 1; b < q; ++b)
            for (uint32_t c = 1; c < q; ++c) {
                ++rep.cases;
                const auto cls = numtheory::biquartic_residue_classes(b, c, q);
                if (!cls.has_residue || !cls.has_nonresidue) {
                    ++rep.violations;
                    if (rep.first_violation.empty())
                        rep.first_violation = "q=" + std::to_string(q) + " b=" + std::to_string(b) +
                                              " c=" + std::to_string(c);
                }
            }
    }
    return rep;
}

}  // namespace zsm::lemmalab
