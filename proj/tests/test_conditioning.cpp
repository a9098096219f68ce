#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "twosided/combinatorics.hpp"
#include "twosided/conditioning.hpp"
#include "twosided/error.hpp"

using namespace twosided;
using testing::from_mask;
using testing::make_pair;

namespace {

// Membership in the k-block admissible set, written from the definition:
// units outside every block keep their observed value, each block is
// constant across its buyers and sellers, and the treated block count is
// preserved.
bool block_member(const KBlockEvent& e, const AssignmentPair& w) {
    for (std::size_t i : e.dropped_buyers)
        if (w.buyer[i] != e.observed.buyer[i]) return false;
    for (std::size_t j : e.dropped_sellers)
        if (w.seller[j] != e.observed.seller[j]) return false;
    std::size_t treated = 0;
    for (const Block& b : e.blocks) {
        const int l = w.buyer[b.buyers[0]];
        for (std::size_t i : b.buyers)
            if (w.buyer[i] != l) return false;
        for (std::size_t j : b.sellers)
            if (w.seller[j] != l) return false;
        treated += static_cast<std::size_t>(l);
    }
    return treated == e.treated_block_count;
}

std::uint64_t enumerate_block_support(const KBlockEvent& e) {
    std::uint64_t count = 0;
    const std::size_t I = e.rows, J = e.cols;
    for (std::uint64_t bm = 0; bm < (1ull << I); ++bm) {
        const AssignmentVector b = from_mask(bm, I);
        // Cheap buyer-side screen before the seller loop.
        bool ok = true;
        for (std::size_t i : e.dropped_buyers) ok = ok && b[i] == e.observed.buyer[i];
        for (const Block& blk : e.blocks)
            for (std::size_t i : blk.buyers) ok = ok && b[i] == b[blk.buyers[0]];
        if (!ok) continue;
        for (std::uint64_t sm = 0; sm < (1ull << J); ++sm) {
            const AssignmentPair w{b, from_mask(sm, J)};
            const bool member = block_member(e, w);
            REQUIRE(member == admissible(e, w));
            count += member;
        }
    }
    return count;
}

std::uint64_t enumerate_spillover_support(const SpilloverEvent& e) {
    std::uint64_t count = 0;
    const std::size_t m = e.randomized_size();
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
        AssignmentPair w;
        w.side(e.side) = from_mask(mask, m);
        w.side(e.fixed_side()) = e.fixed_vector;
        const bool member = w.side(e.side).treated_count() == e.observed_free.treated_count();
        REQUIRE(member == admissible(e, w));
        count += member;
    }
    return count;
}

}  // namespace

TEST_CASE("buyer spillover event of the worked example") {
    const auto pair = make_pair({0, 1, 0, 0, 1}, {1, 0, 1, 0, 0});
    const SpilloverEvent e = build_spillover_event(pair, Side::buyer);
    CHECK(e.side == Side::buyer);
    CHECK(e.fixed_vector == pair.seller);
    CHECK(e.free_count == 2);
    CHECK(e.focal_fixed == std::vector<std::size_t>{1, 3, 4});
    const auto focal = e.focal_pairs();
    CHECK(focal.size() == 15);
    CHECK(e.focal_count() == 15);
    for (const auto& [i, j] : focal) CHECK(pair.seller[j] == 0);
}

TEST_CASE("seller spillover event is the transpose") {
    const auto pair = make_pair({0, 1, 0, 0, 1}, {1, 0, 1, 0, 0});
    const SpilloverEvent e = build_spillover_event(pair, Side::seller);
    CHECK(e.fixed_vector == pair.buyer);
    CHECK(e.free_count == 2);
    CHECK(e.focal_fixed == std::vector<std::size_t>{0, 2, 3});
    std::set<std::pair<std::size_t, std::size_t>> focal;
    for (const auto& p : e.focal_pairs()) focal.insert(p);
    CHECK(focal.size() == 15);
    for (std::size_t i : {0, 2, 3})
        for (std::size_t j = 0; j < 5; ++j) CHECK(focal.count({i, j}) == 1);
}

TEST_CASE("degenerate spillover events") {
    try {
        build_spillover_event(make_pair({0, 1, 0}, {1, 1, 1}), Side::buyer);
        FAIL("expected an error");
    } catch (const DegenerateEventError& e) {
        CHECK(std::string(e.what()).find("no control sellers") != std::string::npos);
    }
    CHECK_THROWS_AS(build_spillover_event(make_pair({1, 1, 1}, {0, 1, 0}), Side::buyer), DegenerateEventError);
    CHECK_THROWS_AS(build_spillover_event(make_pair({0, 0, 0}, {0, 1, 0}), Side::buyer), DegenerateEventError);
    CHECK_THROWS_AS(build_spillover_event(make_pair({1, 1, 1}, {0, 1, 0}), Side::seller), DegenerateEventError);
}

TEST_CASE("k-block event with exact divisibility") {
    const auto pair = make_pair({1, 0, 1, 0, 1, 0, 1, 0}, {0, 0, 1, 1, 1, 1, 0, 0});
    const KBlockEvent e = build_k_block_event(pair, 2);
    CHECK(e.block_count() == 4);
    CHECK(e.treated_block_count == 2);
    CHECK(e.control_block_count() == 2);
    CHECK(e.focal_count() == 16);
    CHECK(e.focal_pairs().size() == 16);
    CHECK(e.dropped_buyers.empty());
    CHECK(e.dropped_sellers.empty());
    CHECK_NOTHROW(build_k_block_event(pair, 2, DivisibilityPolicy::strict));
}

TEST_CASE("k-block event drops the highest-indexed surplus units") {
    const auto pair = make_pair({1, 1, 1, 0, 0, 0}, {0, 0, 0, 1, 1, 1});
    const KBlockEvent e = build_k_block_event(pair, 2);
    CHECK(e.treated_block_count == 1);
    CHECK(e.control_block_count() == 1);
    CHECK(e.dropped_buyers == std::vector<std::size_t>{2, 5});
    CHECK(e.dropped_sellers == std::vector<std::size_t>{2, 5});
    CHECK_THROWS_AS(build_k_block_event(pair, 2, DivisibilityPolicy::strict), ParameterError);

    // Blocks are ordered by smallest buyer index and labels follow the groups.
    REQUIRE(e.block_count() == 2);
    CHECK(e.blocks[0].buyers == std::vector<std::size_t>{0, 1});
    CHECK(e.blocks[0].sellers == std::vector<std::size_t>{3, 4});
    CHECK(e.blocks[0].label == BlockLabel::treated);
    CHECK(e.blocks[1].buyers == std::vector<std::size_t>{3, 4});
    CHECK(e.blocks[1].sellers == std::vector<std::size_t>{0, 1});
    CHECK(e.blocks[1].label == BlockLabel::control);
}

TEST_CASE("k = 1 gives singleton blocks") {
    const auto pair = make_pair({1, 0, 1, 0}, {0, 1, 1, 0});
    const KBlockEvent e = build_k_block_event(pair, 1);
    CHECK(e.block_count() == 4);
    CHECK(e.treated_block_count == 2);
    for (const Block& b : e.blocks) {
        CHECK(b.buyers.size() == 1);
        CHECK(b.sellers.size() == 1);
    }
}

TEST_CASE("k-block structural invariants") {
    Rng rng(77, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t I = 6 + rng.below(20), J = 6 + rng.below(20);
        const AssignmentPair pair{sample_fixed_count(I, 2 + rng.below(I - 4), rng),
                                  sample_fixed_count(J, 2 + rng.below(J - 4), rng)};
        const std::size_t k = 1 + rng.below(3);
        KBlockEvent e;
        try {
            e = build_k_block_event(pair, k);
        } catch (const DegenerateEventError&) {
            continue;
        }
        std::set<std::size_t> rows, cols;
        for (const Block& b : e.blocks) {
            REQUIRE(b.buyers.size() == k);
            REQUIRE(b.sellers.size() == k);
            rows.insert(b.buyers.begin(), b.buyers.end());
            cols.insert(b.sellers.begin(), b.sellers.end());
            const int l = b.label == BlockLabel::treated ? 1 : 0;
            for (std::size_t i : b.buyers) CHECK(pair.buyer[i] == l);
            for (std::size_t j : b.sellers) CHECK(pair.seller[j] == l);
        }
        CHECK(rows.size() == k * e.block_count());
        CHECK(cols.size() == k * e.block_count());
        CHECK(e.focal_pairs().size() == k * k * e.block_count());
        CHECK(admissible(e, pair));
    }
}

TEST_CASE("k-block degenerate cases") {
    CHECK_THROWS_AS(build_k_block_event(make_pair({1, 0, 0, 0}, {1, 0, 0, 0}), 2), DegenerateEventError);
    CHECK_THROWS_AS(build_k_block_event(make_pair({1, 0}, {1, 0}), 0), ParameterError);
}

TEST_CASE("support sizes of the quoted configurations") {
    std::vector<int> b12_4(12, 0), b12_6(12, 0), b6_2(6, 0);
    for (int i = 0; i < 4; ++i) b12_4[i] = 1;
    for (int i = 0; i < 6; ++i) b12_6[i] = 1;
    for (int i = 0; i < 2; ++i) b6_2[i] = 1;
    auto vec = [](const std::vector<int>& v) {
        return AssignmentVector(std::vector<std::uint8_t>(v.begin(), v.end()));
    };
    const auto e495 = build_k_block_event({vec(b12_4), vec(b12_4)}, 1);
    const auto e924 = build_k_block_event({vec(b12_6), vec(b12_6)}, 1);
    const auto e15 = build_k_block_event({vec(b6_2), vec(b6_2)}, 1);
    CHECK(e495.block_count() == 12);
    CHECK(std::llround(std::exp(support_size_log(e495))) == 495);
    CHECK(std::llround(std::exp(support_size_log(e924))) == 924);
    CHECK(std::llround(std::exp(support_size_log(e15))) == 15);
    CHECK(support_size_log(e924) == doctest::Approx(std::log(924.0)).epsilon(1e-12));
}

TEST_CASE("support size agrees with brute-force enumeration") {
    SUBCASE("k-block events") {
        Rng rng(3, 1);
        for (int trial = 0; trial < 12; ++trial) {
            const std::size_t I = 4 + rng.below(5), J = 4 + rng.below(5);
            const AssignmentPair pair{sample_fixed_count(I, 1 + rng.below(I - 1), rng),
                                      sample_fixed_count(J, 1 + rng.below(J - 1), rng)};
            for (std::size_t k = 1; k <= 2; ++k) {
                KBlockEvent e;
                try {
                    e = build_k_block_event(pair, k);
                } catch (const DegenerateEventError&) {
                    continue;
                }
                const auto expected = choose_exact(e.block_count(), e.treated_block_count);
                REQUIRE(expected.has_value());
                CHECK(enumerate_block_support(e) == *expected);
                CHECK(std::llround(std::exp(support_size_log(e))) == static_cast<long long>(*expected));
            }
        }
    }
    SUBCASE("spillover events") {
        for (std::size_t m = 3; m <= 12; ++m) {
            std::vector<std::uint8_t> free(m, 0);
            for (std::size_t i = 0; i < m / 2; ++i) free[i] = 1;
            const AssignmentPair pair{AssignmentVector(free), AssignmentVector{1, 0, 0}};
            const auto buyer = build_spillover_event(pair, Side::buyer);
            CHECK(enumerate_spillover_support(buyer) == *choose_exact(m, m / 2));
            CHECK(std::llround(std::exp(support_size_log(buyer))) == static_cast<long long>(*choose_exact(m, m / 2)));
            const AssignmentPair flipped{AssignmentVector{1, 0, 0}, AssignmentVector(free)};
            const auto seller = build_spillover_event(flipped, Side::seller);
            CHECK(enumerate_spillover_support(seller) == *choose_exact(m, m / 2));
        }
    }
}

TEST_CASE("admissibility rejects altered fixed sides") {
    const auto pair = make_pair({1, 1, 0, 0}, {0, 1, 0});
    const auto e = build_spillover_event(pair, Side::buyer);
    CHECK(admissible(e, pair));
    CHECK(admissible(e, make_pair({0, 1, 1, 0}, {0, 1, 0})));
    CHECK_FALSE(admissible(e, make_pair({1, 1, 0, 0}, {1, 1, 0})));
    CHECK_FALSE(admissible(e, make_pair({1, 1, 1, 0}, {0, 1, 0})));
}

TEST_CASE("log-space binomials") {
    CHECK(log_choose(12, 6) == doctest::Approx(std::log(924.0)).epsilon(1e-13));
    CHECK(log_choose(5, 0) == 0.0);
    CHECK(std::isinf(log_choose(3, 4)));
    CHECK(*choose_exact(60, 30) == 118264581564861424ull);
    CHECK_FALSE(choose_exact(200, 100).has_value());
    CHECK(std::isfinite(log_choose(100000, 50000)));
}
