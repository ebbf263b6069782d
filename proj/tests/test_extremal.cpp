#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "zsm/extremal.hpp"

using namespace zsm::extremal;
using zsm::groups::automorphisms;
using zsm::groups::cyclic_group;
using zsm::groups::make_group;
using zsm::seqengine::ContextPtr;
using zsm::seqengine::Sequence;
using zsm::seqengine::is_product1_free;
using zsm::seqengine::make_context;

namespace {

std::set<std::vector<uint32_t>> as_set(const EnumResult& r) {
    std::set<std::vector<uint32_t>> out;
    for (const auto& em : r.sequences) out.insert(em.elements);
    return out;
}

// Expand orbit representatives through the full automorphism group.
std::set<std::vector<uint32_t>> expand_orbits(const ContextPtr& ctx, const EnumResult& r) {
    auto auts = automorphisms(ctx->cayley());
    std::set<std::vector<uint32_t>> out;
    for (const auto& em : r.sequences) {
        for (const auto& f : auts) {
            std::vector<uint32_t> mapped;
            mapped.reserve(em.elements.size());
            for (uint32_t e : em.elements) mapped.push_back(f[e]);
            std::sort(mapped.begin(), mapped.end());
            out.insert(std::move(mapped));
        }
    }
    return out;
}

std::string temp_path(const char* tag) {
    return std::string("/tmp/zsm_test_") + tag + "_" + std::to_string(::getpid()) + ".json";
}

}  // namespace

TEST_CASE("enumeration over D_6 at length 3 matches the known list") {
    auto ctx = make_context(make_group(3, 2, 2));
    auto res = enumerate_free(ctx, 3);
    std::vector<std::vector<uint32_t>> want{
        {1, 1, 3}, {1, 1, 4}, {1, 1, 5}, {2, 2, 3}, {2, 2, 4}, {2, 2, 5}, {3, 4, 5}};
    REQUIRE(res.sequences.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        CHECK(res.sequences[i].elements == want[i]);  // lexicographic emission order
        CHECK(res.sequences[i].orbit == 1);
    }
    CHECK(res.stats.nodes > 0);
}

TEST_CASE("enumerated sequences are free, and exactly the free ones") {
    auto ctx = make_context(make_group(5, 2, 4));
    auto res = enumerate_free(ctx, 5);
    CHECK(res.sequences.size() == 20);
    for (const auto& em : res.sequences) {
        CHECK(em.elements.size() == 5);
        CHECK(is_product1_free(Sequence(ctx, em.elements)).free);
    }
    // completeness: a free multiset picked by hand is in the list
    CHECK(as_set(res).count({1, 1, 1, 1, 5}) == 1);
}

TEST_CASE("orbit-reduced enumeration expands to the plain one") {
    for (auto [q, m, s] : {std::tuple{3u, 2u, 2u}, {5u, 2u, 4u}, {5u, 4u, 2u}}) {
        auto ctx = make_context(make_group(q, m, s));
        int length = static_cast<int>(m + q - 2);

        auto plain = enumerate_free(ctx, length);
        SearchOpts sym;
        sym.symmetry = true;
        auto reduced = enumerate_free(ctx, length, sym);

        CHECK(reduced.sequences.size() <= plain.sequences.size());
        uint64_t orbit_sum = 0;
        for (const auto& em : reduced.sequences) orbit_sum += em.orbit;
        CHECK(orbit_sum == plain.sequences.size());
        CHECK(expand_orbits(ctx, reduced) == as_set(plain));

        // representatives are the lex-least members of their orbits
        auto plain_set = as_set(plain);
        for (const auto& em : reduced.sequences) CHECK(plain_set.count(em.elements) == 1);
    }
}

TEST_CASE("enumeration respects the emission limit") {
    auto ctx = make_context(make_group(5, 2, 4));
    auto full = enumerate_free(ctx, 5);
    SearchOpts opts;
    opts.emit_limit = 3;
    auto capped = enumerate_free(ctx, 5, opts);
    REQUIRE(capped.sequences.size() == 3);
    for (size_t i = 0; i < 3; ++i)
        CHECK(capped.sequences[i].elements == full.sequences[i].elements);

    // limit composes with jobs by dropping to one worker
    opts.jobs = 4;
    auto capped4 = enumerate_free(ctx, 5, opts);
    REQUIRE(capped4.sequences.size() == 3);
    CHECK(capped4.sequences[2].elements == full.sequences[2].elements);
}

TEST_CASE("enumeration edge cases and validation") {
    auto ctx = make_context(make_group(3, 2, 2));
    auto empty = enumerate_free(ctx, 0);
    REQUIRE(empty.sequences.size() == 1);
    CHECK(empty.sequences[0].elements.empty());

    CHECK(enumerate_free(ctx, 9).sequences.empty());  // above any free length

    CHECK_THROWS_AS(enumerate_free(ctx, -1), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_free(ctx, 33), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_free(make_context(cyclic_group(70)), 2), std::invalid_argument);
}

TEST_CASE("parallel enumeration matches the sequential one") {
    auto ctx = make_context(make_group(5, 4, 2));
    auto seq1 = enumerate_free(ctx, 7);
    SearchOpts opts;
    opts.jobs = 4;
    auto seq4 = enumerate_free(ctx, 7, opts);
    REQUIRE(seq4.sequences.size() == seq1.sequences.size());
    for (size_t i = 0; i < seq1.sequences.size(); ++i)
        CHECK(seq4.sequences[i].elements == seq1.sequences[i].elements);
    CHECK(seq4.stats.nodes == seq1.stats.nodes);
    CHECK(seq4.stats.pruned == seq1.stats.pruned);
}

TEST_CASE("davenport constants for small presentations") {
    for (auto [q, m, s] : {std::tuple{3u, 2u, 2u}, {5u, 2u, 4u}, {5u, 4u, 2u}, {7u, 3u, 2u}}) {
        auto ctx = make_context(make_group(q, m, s));
        auto res = davenport(ctx);
        CHECK(res.constant == static_cast<int>(m + q - 1));
        CHECK_FALSE(res.bound_limited);
        REQUIRE(res.example.size() == static_cast<size_t>(res.constant - 1));
        CHECK(is_product1_free(Sequence(ctx, res.example)).free);

        // maximality: every one-element extension kills freeness
        for (uint32_t e = 0; e < ctx->order(); ++e) {
            auto extended = res.example;
            extended.push_back(e);
            CHECK_FALSE(is_product1_free(Sequence(ctx, extended)).free);
        }
    }
}

TEST_CASE("davenport is invariant under symmetry reduction") {
    auto ctx = make_context(make_group(5, 4, 2));
    auto plain = davenport(ctx);
    SearchOpts opts;
    opts.symmetry = true;
    auto reduced = davenport(ctx, opts);
    CHECK(plain.constant == reduced.constant);
    CHECK(plain.example == reduced.example);  // lex-least survives orbit reduction
    CHECK(plain.bound_limited == reduced.bound_limited);
}

TEST_CASE("davenport over cyclic adapters gives n") {
    for (uint32_t n = 1; n <= 8; ++n) {
        auto res = davenport(make_context(cyclic_group(n)));
        CHECK(res.constant == static_cast<int>(n));
        if (n > 1) {
            REQUIRE(!res.example.empty());
            // the canonical example is g^(n-1) for the first generator, g1
            CHECK(res.example == std::vector<uint32_t>(n - 1, 1));
        }
    }
}

TEST_CASE("a length cap below the answer is reported as bound_limited") {
    auto ctx = make_context(make_group(7, 3, 2));
    SearchOpts opts;
    opts.max_len = 3;
    auto res = davenport(ctx, opts);
    CHECK(res.constant == 4);
    CHECK(res.searched_max_len == 3);
    CHECK(res.bound_limited);
}

TEST_CASE("form II matching") {
    auto ctx = make_context(make_group(3, 2, 2));
    auto fii = match_form_ii(Sequence(ctx, {1, 1, 3}));  // y, y, x
    REQUIRE(fii.has_value());
    CHECK(fii->t == 1);
    CHECK(fii->i == 1);
    CHECK(fii->nu == std::vector<uint32_t>{0});

    fii = match_form_ii(Sequence(ctx, {2, 2, 4}));  // y^2, y^2, x*y
    REQUIRE(fii.has_value());
    CHECK(fii->t == 2);
    CHECK(fii->nu == std::vector<uint32_t>{1});

    CHECK_FALSE(match_form_ii(Sequence(ctx, {3, 4, 5})).has_value());  // no H part
    CHECK_FALSE(match_form_ii(Sequence(ctx, {0, 1, 3})).has_value());  // identity present
    CHECK_FALSE(match_form_ii(Sequence(ctx, {1, 2, 3})).has_value());  // two distinct in H
    CHECK_THROWS_AS(match_form_ii(Sequence(ctx, {1, 1})), std::invalid_argument);

    auto big = make_context(make_group(5, 4, 2));
    // q-1 copies of y plus three elements of N_2: gcd(2,4) = 2 disqualifies
    CHECK_FALSE(match_form_ii(Sequence(big, {1, 1, 1, 1, 10, 11, 12})).has_value());
    // straddling two cosets
    CHECK_FALSE(match_form_ii(Sequence(big, {1, 1, 1, 1, 5, 6, 10})).has_value());
    // valid: nu values are sorted y-exponents
    auto ok = match_form_ii(Sequence(big, {2, 2, 2, 2, 19, 15, 17}));
    REQUIRE(ok.has_value());
    CHECK(ok->t == 2);
    CHECK(ok->i == 3);
    CHECK(ok->nu == std::vector<uint32_t>{0, 2, 4});
}

TEST_CASE("form II census sizes") {
    CHECK(form_ii_expected_count(3, 2) == 6);
    CHECK(form_ii_expected_count(5, 2) == 20);
    CHECK(form_ii_expected_count(5, 4) == 280);
    CHECK(form_ii_expected_count(7, 2) == 42);
    CHECK(form_ii_expected_count(7, 3) == 336);
    CHECK(form_ii_expected_count(7, 6) == 5544);
    CHECK(form_ii_expected_count(11, 2) == 110);
}

TEST_CASE("verify_main_theorem on the good cases") {
    for (auto [q, m, s] : {std::tuple{5u, 2u, 4u}, {7u, 3u, 2u}}) {
        auto ctx = make_context(make_group(q, m, s));
        auto rep = verify_main_theorem(ctx);
        CHECK(rep.verdict == kVerdictHolds);
        CHECK(rep.length == static_cast<int>(m + q - 2));
        CHECK(rep.free_count == rep.matched_count);
        CHECK(rep.free_count == rep.expected_count);
        CHECK(rep.unmatched.empty());
        CHECK(rep.stats.shift_violations == 0);
        CHECK(rep.stats.rbound_violations == 0);
    }
}

TEST_CASE("verify_main_theorem pins the (2,3) counterexample") {
    auto ctx = make_context(make_group(3, 2, 2));
    auto rep = verify_main_theorem(ctx);
    CHECK(rep.verdict == kVerdictCounterexample23);
    CHECK(rep.free_count == 7);
    CHECK(rep.matched_count == 6);
    CHECK(rep.expected_count == 6);
    REQUIRE(rep.unmatched.size() == 1);
    CHECK(rep.unmatched[0] == "x,x*y,x*y^2");
}

TEST_CASE("verify_main_theorem agrees across symmetry and jobs") {
    auto ctx = make_context(make_group(5, 4, 3));
    auto base = verify_main_theorem(ctx);
    for (auto mode : {0, 1, 2}) {
        SearchOpts opts;
        opts.symmetry = (mode == 1);
        opts.jobs = (mode == 2) ? 4 : 1;
        auto rep = verify_main_theorem(ctx, opts);
        CHECK(rep.verdict == base.verdict);
        CHECK(rep.free_count == base.free_count);
        CHECK(rep.matched_count == base.matched_count);
        CHECK(rep.unmatched == base.unmatched);
        if (!opts.symmetry) {  // node counts are part of the determinism contract
            CHECK(rep.stats.nodes == base.stats.nodes);
            CHECK(rep.stats.pruned == base.stats.pruned);
        }
    }
}

TEST_CASE("node budgets persist a cursor and resume to the same answer") {
    auto ctx = make_context(make_group(5, 2, 4));
    auto fresh = enumerate_free(ctx, 5);
    std::string path = temp_path("resume");
    std::remove(path.c_str());

    SearchOpts opts;
    opts.node_budget = 200;  // forces a few interruptions on this search (573 nodes total)
    opts.checkpoint_path = path;
    opts.checkpoint_stride = 1;

    int interruptions = 0;
    EnumResult resumed;
    for (int attempt = 0;; ++attempt) {
        REQUIRE(attempt < 100);
        try {
            resumed = enumerate_free(ctx, 5, opts);
            break;
        } catch (const PartialResultError& e) {
            ++interruptions;
            CHECK(e.persisted);
            CHECK(!e.checkpoint.empty());
        }
    }
    INFO("interruptions: " << interruptions);
    CHECK(interruptions > 0);

    REQUIRE(resumed.sequences.size() == fresh.sequences.size());
    for (size_t i = 0; i < fresh.sequences.size(); ++i)
        CHECK(resumed.sequences[i].elements == fresh.sequences[i].elements);
    CHECK(resumed.stats.nodes == fresh.stats.nodes);
    CHECK(resumed.stats.pruned == fresh.stats.pruned);

    // a stale cursor from a different search is rejected
    CHECK_THROWS_AS(enumerate_free(ctx, 4, opts), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("node budget without a checkpoint path reports nothing persisted") {
    auto ctx = make_context(make_group(5, 2, 4));
    SearchOpts opts;
    opts.node_budget = 10;
    bool threw = false;
    try {
        enumerate_free(ctx, 5, opts);
    } catch (const PartialResultError& e) {
        threw = true;
        CHECK_FALSE(e.persisted);
    }
    CHECK(threw);
}

TEST_CASE("node budgets require a single worker") {
    auto ctx = make_context(make_group(5, 2, 4));
    SearchOpts opts;
    opts.node_budget = 10;
    opts.jobs = 2;
    CHECK_THROWS_AS(enumerate_free(ctx, 5, opts), std::invalid_argument);
}

TEST_CASE("rotation checks run on free sequences with extractable parts") {
    // Random free multisets supported outside H, decomposed; the lemma says
    // every minimal part has rotations inside H, pairwise distinct.
    std::mt19937 rng(11);
    uint64_t parts_seen = 0;
    for (auto [q, m, s] : {std::tuple{5u, 4u, 2u}, {7u, 3u, 2u}, {7u, 6u, 3u}}) {
        auto ctx = make_context(make_group(q, m, s));
        uint32_t n = ctx->order();
        for (int trial = 0; trial < 400; ++trial) {
            size_t len = m + rng() % 3;
            std::vector<uint32_t> elems;
            for (size_t i = 0; i < len; ++i) {
                uint32_t e;
                do {
                    e = rng() % n;
                } while (ctx->in_H(e));
                elems.push_back(e);
            }
            Sequence seq(ctx, elems);
            if (!is_product1_free(seq).free) continue;
            auto dec = zsm::seqengine::decompose(seq);
            CHECK(dec.shift_ok);
            CHECK(dec.rbound_ok);
            parts_seen += dec.parts.size();
            for (const auto& part : dec.parts) {
                auto pis = zsm::seqengine::shift_products(*ctx, part.expanded());
                std::set<uint32_t> distinct(pis.begin(), pis.end());
                CHECK(distinct.size() == pis.size());
                for (uint32_t p : pis) CHECK(ctx->in_H(p));
            }
        }
    }
    CHECK(parts_seen > 0);  // the sweep must not be vacuous
}

TEST_CASE("cyclic structure check over admissible parameters") {
    for (uint32_t n = 3; n <= 12; ++n) {
        for (uint32_t len = (n + 1) / 2 + ((n + 1) % 2 ? 1 : 0); len <= n - 1; ++len) {
            if (2 * len < n + 1) continue;
            auto res = cyclic_structure_check(n, len);
            CHECK(res.holds);
            CHECK(res.counterexample.empty());
            CHECK(res.sequences_checked > 0);
        }
    }
    // at L = n-1 the free sequences are exactly g^(n-1), one per generator
    CHECK(cyclic_structure_check(6, 5).sequences_checked == 2);    // phi(6)
    CHECK(cyclic_structure_check(12, 11).sequences_checked == 4);  // phi(12)

    CHECK_THROWS_AS(cyclic_structure_check(9, 4), std::invalid_argument);   // 2L < n+1
    CHECK_THROWS_AS(cyclic_structure_check(9, 9), std::invalid_argument);   // L > n-1
    CHECK_THROWS_AS(cyclic_structure_check(17, 16), std::invalid_argument); // n cap
    CHECK_THROWS_AS(cyclic_structure_check(2, 2), std::invalid_argument);
}
