#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twosided/conditioning.hpp"
#include "twosided/core.hpp"

namespace twosided {

enum class StatisticKind { diff_means, studentized };

std::string to_string(StatisticKind kind);

/// Per-unit aggregates over the focal cells: one entry per randomized-side
/// unit for spillover events, one per block for k-block events. Every unit
/// covers the same number of focal cells, so any statistic over the focal
/// cells is a function of these sums and the unit labels.
struct RowAggregate {
    std::vector<double> sums;
    std::vector<double> means;
    double cells_per_unit = 0.0;

    std::size_t size() const noexcept { return sums.size(); }
};

RowAggregate spillover_aggregates(const OutcomeMatrix& y, const SpilloverEvent& event);
RowAggregate block_aggregates(const OutcomeMatrix& y, const KBlockEvent& event);

/// Treatment label of every aggregate unit under `pair`. Throws
/// ParameterError if `pair` is not inside the event's admissible set in a way
/// the statistic depends on (fixed side altered, block not constant).
std::vector<std::uint8_t> unit_labels(const SpilloverEvent& event, const AssignmentPair& pair);
std::vector<std::uint8_t> unit_labels(const KBlockEvent& event, const AssignmentPair& pair);

/// Mean over treated focal cells minus mean over control focal cells.
double diff_means(const RowAggregate& agg, std::span<const std::uint8_t> labels);

/// diff_means / sqrt(V), V the two-sample variance of the unit means.
double studentized(const RowAggregate& agg, std::span<const std::uint8_t> labels);

double evaluate(StatisticKind kind, const RowAggregate& agg, std::span<const std::uint8_t> labels);

double diff_means_spillover(const OutcomeMatrix& y, const AssignmentPair& pair, const SpilloverEvent& event);
double diff_means_block(const OutcomeMatrix& y, const AssignmentPair& pair, const KBlockEvent& event);
double studentized_spillover(const OutcomeMatrix& y, const AssignmentPair& pair, const SpilloverEvent& event);
double studentized_block(const OutcomeMatrix& y, const AssignmentPair& pair, const KBlockEvent& event);

}  // namespace twosided
