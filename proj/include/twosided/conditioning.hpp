#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "twosided/core.hpp"

namespace twosided {

/// Focal units and admissible assignments for a spillover test.
///
/// For side == buyer the sellers are held at their observed assignment and
/// the buyer vector is re-randomized with its treated count preserved; the
/// focal pairs are every buyer crossed with every control seller. side ==
/// seller is the transpose.
struct SpilloverEvent {
    Side side = Side::buyer;               // the randomized side
    AssignmentVector fixed_vector;         // observed assignment of the other side
    AssignmentVector observed_free;        // observed assignment of the randomized side
    std::size_t free_count = 0;            // treated count preserved on the randomized side
    std::size_t rows = 0, cols = 0;        // (I, J)
    std::vector<std::size_t> focal_fixed;  // control units of the fixed side, ascending

    Side fixed_side() const noexcept { return other(side); }
    std::size_t randomized_size() const noexcept { return observed_free.size(); }
    /// Materialized (buyer, seller) focal pairs in row-major order.
    std::vector<std::pair<std::size_t, std::size_t>> focal_pairs() const;
    std::size_t focal_count() const noexcept { return randomized_size() * focal_fixed.size(); }
};

enum class BlockLabel { control = 0, treated = 1 };

struct Block {
    std::vector<std::size_t> buyers;   // k ascending indices
    std::vector<std::size_t> sellers;  // k ascending indices
    BlockLabel label = BlockLabel::control;
};

/// How to treat units that do not fill a complete k-group.
enum class DivisibilityPolicy {
    drop_surplus,  // drop the highest-indexed leftover units of each class
    strict,        // refuse (ParameterError) unless nothing would be dropped
};

/// k x k diagonal-block conditioning event for the total-effect test.
struct KBlockEvent {
    std::size_t k = 0;
    std::vector<Block> blocks;  // ordered by smallest buyer index
    std::size_t treated_block_count = 0;
    std::size_t rows = 0, cols = 0;
    std::vector<std::size_t> dropped_buyers;
    std::vector<std::size_t> dropped_sellers;
    AssignmentPair observed;

    std::size_t block_count() const noexcept { return blocks.size(); }
    std::size_t control_block_count() const noexcept { return blocks.size() - treated_block_count; }
    std::vector<std::pair<std::size_t, std::size_t>> focal_pairs() const;
    std::size_t focal_count() const noexcept { return blocks.size() * k * k; }
};

using ConditioningEvent = std::variant<SpilloverEvent, KBlockEvent>;

SpilloverEvent build_spillover_event(const AssignmentPair& pair, Side side);

KBlockEvent build_k_block_event(const AssignmentPair& pair, std::size_t k,
                                DivisibilityPolicy policy = DivisibilityPolicy::drop_surplus);

/// Natural log of the number of distinct assignments the resampler can reach.
double support_size_log(const SpilloverEvent& event) noexcept;
double support_size_log(const KBlockEvent& event) noexcept;
double support_size_log(const ConditioningEvent& event) noexcept;

/// Structural membership checks for resampled assignments.
bool admissible(const SpilloverEvent& event, const AssignmentPair& pair) noexcept;
bool admissible(const KBlockEvent& event, const AssignmentPair& pair) noexcept;

}  // namespace twosided
