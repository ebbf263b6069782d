#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "zsm/lemmalab.hpp"
#include "zsm/numtheory.hpp"

using namespace zsm::lemmalab;

TEST_CASE("residue set construction and queries") {
    ResidueSet s(7, {0, 2, 3});
    CHECK(s.modulus() == 7);
    CHECK(s.size() == 3);
    CHECK_FALSE(s.empty());
    CHECK(s.contains(0));
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(1));
    CHECK(s.contains(9));  // reduced mod 7
    CHECK(s.elements() == std::vector<uint32_t>{0, 2, 3});
    CHECK(s.to_string() == "{0,2,3}");

    s.insert(8);  // 1 mod 7
    CHECK(s.contains(1));
    CHECK(s.size() == 4);

    CHECK(ResidueSet(5).to_string() == "{}");
    CHECK(ResidueSet::all(5).size() == 5);
    CHECK(ResidueSet::all(128).size() == 128);

    CHECK_THROWS_AS(ResidueSet(1), std::invalid_argument);
    CHECK_THROWS_AS(ResidueSet(129), std::invalid_argument);
}

TEST_CASE("residue set algebra") {
    ResidueSet s(7, {1, 2, 5});
    CHECK(s.complement() == ResidueSet(7, {0, 3, 4, 6}));
    CHECK(s.negated() == ResidueSet(7, {6, 5, 2}));
    CHECK(s.translated(3) == ResidueSet(7, {4, 5, 1}));
    CHECK(s.translated(10) == s.translated(3));
    CHECK(s.translated(0) == s);
    CHECK(s.scaled(2) == ResidueSet(7, {2, 4, 3}));
    CHECK(s.scaled(0) == ResidueSet(7, {0}));
    CHECK(ResidueSet(7, {0}).negated() == ResidueSet(7, {0}));

    ResidueSet t(7, {0, 1});
    t.unite(s);
    CHECK(t == ResidueSet(7, {0, 1, 2, 5}));
    ResidueSet other(11, {0});
    CHECK_THROWS_AS(t.unite(other), std::invalid_argument);
}

TEST_CASE("sumset matches the definition") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const uint32_t q = 3 + rng() % 29;
        ResidueSet x(q), y(q);
        for (uint32_t r = 0; r < q; ++r) {
            if (rng() % 3 == 0) x.insert(r);
            if (rng() % 3 == 0) y.insert(r);
        }
        bool want[32] = {};
        for (uint32_t a : x.elements())
            for (uint32_t b : y.elements()) want[(a + b) % q] = true;
        const ResidueSet z = sumset(x, y);
        for (uint32_t r = 0; r < q; ++r) CHECK(z.contains(r) == want[r]);
    }
    CHECK_THROWS_AS(sumset(ResidueSet(5, {1}), ResidueSet(7, {1})), std::invalid_argument);
}

TEST_CASE("cauchy-davenport lower bound") {
    CHECK(cauchy_davenport_check({ResidueSet(7, {0, 1}), ResidueSet(7, {2}),
                                  ResidueSet(7, {3, 4, 5})}));

    // the r-fold bound over random nonempty subsets of a prime modulus
    std::mt19937 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const uint32_t q = (trial % 2) ? 11 : 13;
        std::vector<ResidueSet> sets;
        for (int k = 0; k < 2 + static_cast<int>(rng() % 3); ++k) {
            ResidueSet s(q);
            s.insert(rng() % q);
            for (uint32_t r = 0; r < q; ++r)
                if (rng() % 4 == 0) s.insert(r);
            sets.push_back(s);
        }
        CHECK(cauchy_davenport_check(sets));
    }

    CHECK_THROWS_AS(cauchy_davenport_check({}), std::invalid_argument);
    CHECK_THROWS_AS(cauchy_davenport_check({ResidueSet(8, {1})}), std::invalid_argument);
    CHECK_THROWS_AS(cauchy_davenport_check({ResidueSet(7, {1}), ResidueSet(5, {1})}),
                    std::invalid_argument);
    CHECK_THROWS_AS(cauchy_davenport_check({ResidueSet(7, {1}), ResidueSet(7)}),
                    std::invalid_argument);
}

TEST_CASE("critical pair classification: each condition in isolation") {
    SUBCASE("singleton side") {
        auto v = vosper_classify(ResidueSet(7, {1}), ResidueSet(7, {0, 2, 3}));
        CHECK(v.equality);
        CHECK(v.cond_b);
        CHECK_FALSE(v.cond_a);
        CHECK_FALSE(v.cond_c);
        CHECK_FALSE(v.cond_d);
        CHECK(v.consistent());
    }
    SUBCASE("sizes exceeding the modulus") {
        auto v = vosper_classify(ResidueSet(7, {0, 1, 2, 3, 4}), ResidueSet(7, {0, 1, 2, 3}));
        CHECK(v.equality);
        CHECK(v.cond_a);
        CHECK(v.consistent());
    }
    SUBCASE("complement pair") {
        // Y is the complement of c - X for c = 0, so X + Y misses exactly 0.
        ResidueSet x(7, {0, 1, 3});
        ResidueSet y = x.negated().translated(0).complement();
        auto v = vosper_classify(x, y);
        CHECK(v.equality);
        CHECK(v.cond_c);
        CHECK_FALSE(v.cond_a);
        CHECK_FALSE(v.cond_b);
        CHECK_FALSE(v.cond_d);
        REQUIRE(v.c_witness.has_value());
        CHECK(*v.c_witness == 0);
        CHECK(v.consistent());
    }
    SUBCASE("arithmetic progressions with a shared difference") {
        auto v = vosper_classify(ResidueSet(7, {1, 3, 5}), ResidueSet(7, {2, 4}));
        CHECK(v.equality);
        CHECK(v.cond_d);
        CHECK_FALSE(v.cond_a);
        CHECK_FALSE(v.cond_b);
        CHECK_FALSE(v.cond_c);
        REQUIRE(v.d_difference.has_value());
        CHECK(*v.d_difference == 2);
        CHECK(v.consistent());
    }
    SUBCASE("strict inequality") {
        ResidueSet x(7, {0, 1, 3});
        auto v = vosper_classify(x, x);  // |X+X| = 6 > 5
        CHECK_FALSE(v.equality);
        CHECK_FALSE(v.cond_a);
        CHECK_FALSE(v.cond_b);
        CHECK_FALSE(v.cond_c);
        CHECK_FALSE(v.cond_d);
        CHECK(v.consistent());
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(vosper_classify(ResidueSet(9, {1}), ResidueSet(9, {1})),
                        std::invalid_argument);
        CHECK_THROWS_AS(vosper_classify(ResidueSet(7, {1}), ResidueSet(5, {1})),
                        std::invalid_argument);
        CHECK_THROWS_AS(vosper_classify(ResidueSet(7), ResidueSet(7, {1})),
                        std::invalid_argument);
    }
}

TEST_CASE("exhaustive critical pair sweeps stay consistent") {
    auto r3 = vosper_exhaustive(3);
    CHECK(r3.cases == 49);  // (2^3 - 1)^2 ordered pairs
    CHECK(r3.violations == 0);
    CHECK(r3.first_violation.empty());

    auto r5 = vosper_exhaustive(5);
    CHECK(r5.cases == 961);
    CHECK(r5.violations == 0);

    auto r7 = vosper_exhaustive(7);
    CHECK(r7.cases == (127u * 127u));
    CHECK(r7.violations == 0);

    CHECK_THROWS_AS(vosper_exhaustive(4), std::invalid_argument);
    CHECK_THROWS_AS(vosper_exhaustive(2), std::invalid_argument);
    CHECK_THROWS_AS(vosper_exhaustive(17), std::invalid_argument);
}

TEST_CASE("interval leakage under multiplication") {
    // A = {1..k-1}, B = {k..q-1}; the witness is the smallest leaking element.
    CHECK(interval_invariance_counterexample(5, 2, 2) == 1);   // 1*2 lands in B
    CHECK(interval_invariance_counterexample(7, 2, 4) == 2);   // 1*2 stays, 2*2 leaks
    CHECK(interval_invariance_counterexample(7, 2, 5) == 3);   // 3*2 = 6 leaks
    CHECK(interval_invariance_counterexample(7, 3, 3) == 1);
    CHECK(interval_invariance_counterexample(13, 12, 12) == 1);  // 1*12 = 12 >= k

    // s is reduced mod q before anything else
    CHECK(interval_invariance_counterexample(7, 9, 4) ==
          interval_invariance_counterexample(7, 2, 4));

    CHECK_THROWS_AS(interval_invariance_counterexample(4, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(interval_invariance_counterexample(3, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(interval_invariance_counterexample(7, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(interval_invariance_counterexample(7, 8, 3), std::invalid_argument);
    CHECK_THROWS_AS(interval_invariance_counterexample(7, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(interval_invariance_counterexample(7, 2, 7), std::invalid_argument);

    auto sweep = interval_invariance_sweep(11);
    CHECK(sweep.cases == 9 + 25 + 81);  // (q-2)^2 for q = 5, 7, 11
    CHECK(sweep.violations == 0);
    CHECK(sweep.first_violation.empty());
}

TEST_CASE("swapping two distinct coefficients changes the weighted sum") {
    // exhaustive over every coefficient vector and index pair at small sizes
    for (auto [q, s] : {std::pair{5u, 4u}, {7u, 6u}}) {  // ord_q(s) = 2
        for (uint32_t a0 = 0; a0 < q; ++a0)
            for (uint32_t a1 = 0; a1 < q; ++a1) {
                if (a0 == a1) continue;
                CHECK(coefficient_swap_distinct({a0, a1}, s, q, 0, 1));
                CHECK(coefficient_swap_distinct({a0, a1}, s, q, 1, 0));
            }
    }
    for (uint32_t s : {2u, 4u}) {  // ord_7 = 3
        for (uint32_t a0 = 0; a0 < 7; ++a0)
            for (uint32_t a1 = 0; a1 < 7; ++a1)
                for (uint32_t a2 = 0; a2 < 7; ++a2)
                    for (uint32_t i = 0; i < 3; ++i)
                        for (uint32_t j = 0; j < 3; ++j) {
                            const std::vector<uint32_t> a{a0, a1, a2};
                            if (i == j || a[i] == a[j]) continue;
                            CHECK(coefficient_swap_distinct(a, s, 7, i, j));
                        }
    }

    // random vectors at the largest orders
    std::mt19937 rng(2026);
    for (int trial = 0; trial < 300; ++trial) {
        const bool full = trial % 2 == 0;
        const uint32_t q = 13, s = full ? 2 : 4, m = full ? 12 : 6;
        std::vector<uint32_t> a(m);
        for (auto& v : a) v = rng() % q;
        const uint32_t i = rng() % m;
        uint32_t j = rng() % m;
        if (i == j || a[i] == a[j]) continue;
        CHECK(coefficient_swap_distinct(a, s, q, i, j));
    }

    CHECK_THROWS_AS(coefficient_swap_distinct({1, 2}, 4, 5, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_swap_distinct({1, 2}, 4, 5, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_swap_distinct({1, 1}, 4, 5, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_swap_distinct({1, 6}, 4, 5, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_swap_distinct({1, 2}, 2, 7, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_swap_distinct({1}, 4, 5, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_swap_distinct({1, 2}, 3, 8, 0, 1), std::invalid_argument);
}

TEST_CASE("permutation sums at half order") {
    // q = 13, s = 4 (order 6): with coefficients 1,1,2,2,1,1 the identity
    // arrangement sums to 0, so the image is the 15 pairwise sums of the
    // weights 4^k -- which cover all of Z_13.
    const std::vector<uint32_t> a{1, 1, 2, 2, 1, 1};
    const ResidueSet sums = perm_sum_set(a, 4, 13);
    CHECK(sums.size() == 13);
    CHECK(sums.size() >= 12);

    // cyclic shifts of any arrangement scale its sum by powers of s
    uint64_t alpha = 0, w = 1;
    for (uint32_t k = 0; k < 6; ++k) {
        alpha = (alpha + a[k] * w) % 13;
        w = w * 4 % 13;
    }
    CHECK(alpha == 2);
    for (uint32_t j = 0, v = static_cast<uint32_t>(alpha); j < 6; ++j, v = v * 4 % 13)
        CHECK(sums.contains(v));

    CHECK_THROWS_AS(perm_sum_set({1, 2, 1, 2, 1}, 4, 13), std::invalid_argument);  // size
    CHECK_THROWS_AS(perm_sum_set(a, 2, 13), std::invalid_argument);   // ord 12, not 6
    CHECK_THROWS_AS(perm_sum_set(a, 4, 19), std::invalid_argument);   // 19 = 3 (mod 4)
    CHECK_THROWS_AS(perm_sum_set({1, 2}, 2, 5), std::invalid_argument);  // q too small
    CHECK_THROWS_AS(perm_sum_set({1, 1, 1, 2, 1, 2}, 4, 13), std::invalid_argument);
    CHECK_THROWS_AS(perm_sum_set({1, 1, 14, 2, 1, 2}, 4, 13), std::invalid_argument);
}

TEST_CASE("permutation sums at full order split by parity") {
    const std::vector<uint32_t> a{1, 1, 1, 1, 2, 2, 2, 2, 1, 1, 1, 1};
    auto [evens, odds] = split_perm_sum_sets(a, 2, 13);
    // both halves reduce to the half-order instance above (weights are
    // powers of s^2 = 4, odd side scaled by s)
    CHECK(evens.size() == 13);
    CHECK(odds.size() == 13);

    CHECK_THROWS_AS(split_perm_sum_sets({1, 2, 1, 2}, 2, 13), std::invalid_argument);
    CHECK_THROWS_AS(split_perm_sum_sets(a, 4, 13), std::invalid_argument);  // ord 6
    // positions 0, 4, 8 all carry the same value: class 0 (mod 4) is constant
    const std::vector<uint32_t> bad{1, 1, 2, 2, 1, 1, 2, 2, 1, 1, 2, 2};
    CHECK_THROWS_AS(split_perm_sum_sets(bad, 2, 13), std::invalid_argument);
}

TEST_CASE("randomized permutation-sum trials never fall short") {
    auto half = perm_sum_trials(13, 4, 60, 99);
    CHECK(half.cases == 60);
    CHECK(half.violations == 0);

    auto full = perm_sum_trials(13, 2, 60, 99);
    CHECK(full.cases == 60);
    CHECK(full.violations == 0);

    auto bigger = perm_sum_trials(17, 2, 25, 99);  // ord_17(2) = 8 = (q-1)/2
    CHECK(bigger.violations == 0);

    CHECK_THROWS_AS(perm_sum_trials(19, 2, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(perm_sum_trials(13, 5, 5, 0), std::invalid_argument);  // ord 4
}

TEST_CASE("quartic curve counts stay near the modulus") {
    auto rep = quartic_bound_sweep(13);
    CHECK(rep.cases == 64 + 1728);  // (q-1)^3 for q = 5 and q = 13
    CHECK(rep.violations == 0);
    CHECK(rep.first_violation.empty());

    // the sweep's histogram agrees with the direct counter on a spot value
    auto direct = zsm::numtheory::count_quartic_solutions(1, 1, 1, 13);
    CHECK(direct.count == 18);
    CHECK(direct.within_bound);
}

TEST_CASE("biquartic translates meet both quadratic classes above 13") {
    auto rep = biquartic_class_sweep({17, 29});
    CHECK(rep.cases == 256 + 784);
    CHECK(rep.violations == 0);
    CHECK(rep.first_violation.empty());

    // At q = 13 the translate set has only three values; whenever -c/b is a
    // fourth power one of them is 0 and the other two share a class.  The
    // sweep reports those 36 degenerate pairs rather than hiding them; the
    // per-pair pinning lives in the number-theory tests.
    auto edge = biquartic_class_sweep({13});
    CHECK(edge.cases == 144);
    CHECK(edge.violations == 36);
    CHECK(edge.first_violation == "q=13 b=1 c=4");

    CHECK_THROWS_AS(biquartic_class_sweep({21}), std::invalid_argument);
    CHECK_THROWS_AS(biquartic_class_sweep({19}), std::invalid_argument);
    CHECK_THROWS_AS(biquartic_class_sweep({5}), std::invalid_argument);
}
