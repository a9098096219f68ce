#include "twosided/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twosided/error.hpp"
#include "twosided/numeric.hpp"

namespace twosided {

std::string to_string(StatisticKind kind) {
    return kind == StatisticKind::diff_means ? "diff_means" : "studentized";
}

namespace {

void check_dims(const OutcomeMatrix& y, std::size_t rows, std::size_t cols) {
    if (y.rows() != rows || y.cols() != cols)
        throw ShapeError("outcome matrix is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                         " but the event is " + std::to_string(rows) + "x" + std::to_string(cols));
}

void finish_means(RowAggregate& agg) {
    agg.means.resize(agg.sums.size());
    for (std::size_t u = 0; u < agg.sums.size(); ++u) agg.means[u] = agg.sums[u] / agg.cells_per_unit;
}

struct ArmCounts {
    std::size_t treated = 0;
    std::size_t control = 0;
};

ArmCounts count_arms(const RowAggregate& agg, std::span<const std::uint8_t> labels) {
    if (labels.size() != agg.size())
        throw ShapeError("label vector has " + std::to_string(labels.size()) + " entries, aggregate has " +
                         std::to_string(agg.size()));
    ArmCounts c;
    for (std::uint8_t l : labels) (l ? c.treated : c.control) += 1;
    return c;
}

}  // namespace

RowAggregate spillover_aggregates(const OutcomeMatrix& y, const SpilloverEvent& event) {
    check_dims(y, event.rows, event.cols);
    RowAggregate agg;
    agg.cells_per_unit = static_cast<double>(event.focal_fixed.size());
    const std::size_t units = event.randomized_size();
    agg.sums.resize(units);
    for (std::size_t u = 0; u < units; ++u) {
        CompensatedSum s;
        if (event.side == Side::buyer) {
            for (std::size_t j : event.focal_fixed) s.add(y(u, j));
        } else {
            for (std::size_t i : event.focal_fixed) s.add(y(i, u));
        }
        agg.sums[u] = s.value();
    }
    finish_means(agg);
    return agg;
}

RowAggregate block_aggregates(const OutcomeMatrix& y, const KBlockEvent& event) {
    check_dims(y, event.rows, event.cols);
    RowAggregate agg;
    agg.cells_per_unit = static_cast<double>(event.k * event.k);
    agg.sums.reserve(event.block_count());
    for (const Block& b : event.blocks) {
        CompensatedSum s;
        for (std::size_t i : b.buyers)
            for (std::size_t j : b.sellers) s.add(y(i, j));
        agg.sums.push_back(s.value());
    }
    finish_means(agg);
    return agg;
}

std::vector<std::uint8_t> unit_labels(const SpilloverEvent& event, const AssignmentPair& pair) {
    if (pair.rows() != event.rows || pair.cols() != event.cols)
        throw ShapeError("assignment does not match the event dimensions");
    // The focal columns (rows) are only valid while the fixed side is the
    // observed one.
    if (!(pair.side(event.fixed_side()) == event.fixed_vector))
        throw ParameterError("assignment changes the fixed " + to_string(event.fixed_side()) + " side");
    const auto bits = pair.side(event.side).bits();
    return {bits.begin(), bits.end()};
}

std::vector<std::uint8_t> unit_labels(const KBlockEvent& event, const AssignmentPair& pair) {
    if (pair.rows() != event.rows || pair.cols() != event.cols)
        throw ShapeError("assignment does not match the event dimensions");
    std::vector<std::uint8_t> labels;
    labels.reserve(event.block_count());
    for (const Block& b : event.blocks) {
        const std::uint8_t v = pair.buyer[b.buyers.front()];
        const bool constant =
            std::all_of(b.buyers.begin(), b.buyers.end(), [&](std::size_t i) { return pair.buyer[i] == v; }) &&
            std::all_of(b.sellers.begin(), b.sellers.end(), [&](std::size_t j) { return pair.seller[j] == v; });
        if (!constant) throw ParameterError("assignment is not constant within a block");
        labels.push_back(v);
    }
    return labels;
}

double diff_means(const RowAggregate& agg, std::span<const std::uint8_t> labels) {
    const ArmCounts arms = count_arms(agg, labels);
    if (arms.treated == 0) throw DegenerateArmError("treated arm is empty");
    if (arms.control == 0) throw DegenerateArmError("control arm is empty");
    CompensatedSum treated, control;
    for (std::size_t u = 0; u < agg.size(); ++u) (labels[u] ? treated : control).add(agg.sums[u]);
    const double n1 = static_cast<double>(arms.treated) * agg.cells_per_unit;
    const double n0 = static_cast<double>(arms.control) * agg.cells_per_unit;
    return treated.value() / n1 - control.value() / n0;
}

double studentized(const RowAggregate& agg, std::span<const std::uint8_t> labels) {
    const ArmCounts arms = count_arms(agg, labels);
    if (arms.treated < 2 || arms.control < 2)
        throw VarianceUndefinedError("studentization needs at least two units per arm (treated=" +
                                     std::to_string(arms.treated) + ", control=" + std::to_string(arms.control) + ")");
    CompensatedSum mean1, mean0;
    for (std::size_t u = 0; u < agg.size(); ++u) (labels[u] ? mean1 : mean0).add(agg.means[u]);
    const double m1 = mean1.value() / static_cast<double>(arms.treated);
    const double m0 = mean0.value() / static_cast<double>(arms.control);

    CompensatedSum ss1, ss0;
    double scale = 0.0;
    for (std::size_t u = 0; u < agg.size(); ++u) {
        const double d = agg.means[u] - (labels[u] ? m1 : m0);
        (labels[u] ? ss1 : ss0).add(d * d);
        scale = std::max(scale, std::fabs(agg.means[u]));
    }
    const double n1 = static_cast<double>(arms.treated);
    const double n0 = static_cast<double>(arms.control);
    const double v = ss1.value() / (n1 * (n1 - 1.0)) + ss0.value() / (n0 * (n0 - 1.0));
    // Deviations at rounding level count as zero.
    if (!(std::sqrt(v) > 1e-13 * scale)) throw ZeroVarianceError("studentization variance is zero");
    return diff_means(agg, labels) / std::sqrt(v);
}

double evaluate(StatisticKind kind, const RowAggregate& agg, std::span<const std::uint8_t> labels) {
    return kind == StatisticKind::diff_means ? diff_means(agg, labels) : studentized(agg, labels);
}

double diff_means_spillover(const OutcomeMatrix& y, const AssignmentPair& pair, const SpilloverEvent& event) {
    const auto labels = unit_labels(event, pair);
    return diff_means(spillover_aggregates(y, event), labels);
}

double diff_means_block(const OutcomeMatrix& y, const AssignmentPair& pair, const KBlockEvent& event) {
    const auto labels = unit_labels(event, pair);
    return diff_means(block_aggregates(y, event), labels);
}

double studentized_spillover(const OutcomeMatrix& y, const AssignmentPair& pair, const SpilloverEvent& event) {
    const auto labels = unit_labels(event, pair);
    return studentized(spillover_aggregates(y, event), labels);
}

double studentized_block(const OutcomeMatrix& y, const AssignmentPair& pair, const KBlockEvent& event) {
    const auto labels = unit_labels(event, pair);
    return studentized(block_aggregates(y, event), labels);
}

}  // namespace twosided
