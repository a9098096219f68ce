#include "twosided/conditioning.hpp"

#include <algorithm>

#include "twosided/combinatorics.hpp"
#include "twosided/error.hpp"

namespace twosided {

namespace {

std::string plural(Side s) { return to_string(s) + "s"; }

// Buyer-path construction on an abstract (randomized, fixed) pair of
// vectors; the seller event is the same construction on the transposed
// array.
SpilloverEvent spillover_from_vectors(const AssignmentVector& randomized, const AssignmentVector& fixed,
                                      Side side) {
    if (fixed.control_count() == 0)
        throw DegenerateEventError("no control " + plural(other(side)));
    if (randomized.treated_count() == 0)
        throw DegenerateEventError("no treated " + plural(side) + " to randomize");
    if (randomized.control_count() == 0)
        throw DegenerateEventError("no control " + plural(side) + " to randomize");

    SpilloverEvent e;
    e.side = side;
    e.fixed_vector = fixed;
    e.observed_free = randomized;
    e.free_count = randomized.treated_count();
    e.focal_fixed = fixed.indices_of(false);
    return e;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> SpilloverEvent::focal_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(focal_count());
    if (side == Side::buyer) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j : focal_fixed) out.emplace_back(i, j);
    } else {
        for (std::size_t i : focal_fixed)
            for (std::size_t j = 0; j < cols; ++j) out.emplace_back(i, j);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> KBlockEvent::focal_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(focal_count());
    for (const Block& b : blocks)
        for (std::size_t i : b.buyers)
            for (std::size_t j : b.sellers) out.emplace_back(i, j);
    std::sort(out.begin(), out.end());
    return out;
}

SpilloverEvent build_spillover_event(const AssignmentPair& pair, Side side) {
    if (pair.rows() == 0 || pair.cols() == 0) throw ShapeError("assignment pair has an empty side");
    SpilloverEvent e = spillover_from_vectors(pair.side(side), pair.side(other(side)), side);
    e.rows = pair.rows();
    e.cols = pair.cols();
    return e;
}

KBlockEvent build_k_block_event(const AssignmentPair& pair, std::size_t k, DivisibilityPolicy policy) {
    if (k < 1) throw ParameterError("block size k must be at least 1");

    const auto tb = pair.buyer.indices_of(true);
    const auto cb = pair.buyer.indices_of(false);
    const auto ts = pair.seller.indices_of(true);
    const auto cs = pair.seller.indices_of(false);

    const std::size_t n_treated = std::min(tb.size() / k, ts.size() / k);
    const std::size_t n_control = std::min(cb.size() / k, cs.size() / k);

    if (policy == DivisibilityPolicy::strict) {
        const bool exact = tb.size() % k == 0 && cb.size() % k == 0 && ts.size() % k == 0 &&
                           cs.size() % k == 0 && tb.size() == ts.size() && cb.size() == cs.size();
        if (!exact)
            throw ParameterError("strict divisibility: treated/control counts must be equal across sides and "
                                 "divisible by k=" + std::to_string(k));
    }
    if (n_treated == 0) throw DegenerateEventError("k=" + std::to_string(k) + " leaves no treated block");
    if (n_control == 0) throw DegenerateEventError("k=" + std::to_string(k) + " leaves no control block");

    KBlockEvent e;
    e.k = k;
    e.rows = pair.rows();
    e.cols = pair.cols();
    e.observed = pair;
    e.treated_block_count = n_treated;

    std::vector<std::uint8_t> used_buyer(pair.rows(), 0), used_seller(pair.cols(), 0);
    auto add_blocks = [&](const std::vector<std::size_t>& buyers, const std::vector<std::size_t>& sellers,
                          std::size_t count, BlockLabel label) {
        for (std::size_t s = 0; s < count; ++s) {
            Block b;
            b.label = label;
            b.buyers.assign(buyers.begin() + static_cast<std::ptrdiff_t>(s * k),
                            buyers.begin() + static_cast<std::ptrdiff_t>((s + 1) * k));
            b.sellers.assign(sellers.begin() + static_cast<std::ptrdiff_t>(s * k),
                             sellers.begin() + static_cast<std::ptrdiff_t>((s + 1) * k));
            for (std::size_t i : b.buyers) used_buyer[i] = 1;
            for (std::size_t j : b.sellers) used_seller[j] = 1;
            e.blocks.push_back(std::move(b));
        }
    };
    add_blocks(tb, ts, n_treated, BlockLabel::treated);
    add_blocks(cb, cs, n_control, BlockLabel::control);
    std::sort(e.blocks.begin(), e.blocks.end(),
              [](const Block& a, const Block& b) { return a.buyers.front() < b.buyers.front(); });

    for (std::size_t i = 0; i < pair.rows(); ++i)
        if (!used_buyer[i]) e.dropped_buyers.push_back(i);
    for (std::size_t j = 0; j < pair.cols(); ++j)
        if (!used_seller[j]) e.dropped_sellers.push_back(j);
    return e;
}

double support_size_log(const SpilloverEvent& event) noexcept {
    return log_choose(event.randomized_size(), event.free_count);
}

double support_size_log(const KBlockEvent& event) noexcept {
    return log_choose(event.block_count(), event.treated_block_count);
}

double support_size_log(const ConditioningEvent& event) noexcept {
    return std::visit([](const auto& e) { return support_size_log(e); }, event);
}

bool admissible(const SpilloverEvent& event, const AssignmentPair& pair) noexcept {
    if (pair.rows() != event.rows || pair.cols() != event.cols) return false;
    return pair.side(event.fixed_side()) == event.fixed_vector &&
           pair.side(event.side).treated_count() == event.free_count;
}

bool admissible(const KBlockEvent& event, const AssignmentPair& pair) noexcept {
    if (pair.rows() != event.rows || pair.cols() != event.cols) return false;
    if (pair.buyer.treated_count() != event.observed.buyer.treated_count() ||
        pair.seller.treated_count() != event.observed.seller.treated_count())
        return false;
    for (const Block& b : event.blocks) {
        const std::uint8_t v = pair.buyer[b.buyers.front()];
        for (std::size_t i : b.buyers)
            if (pair.buyer[i] != v) return false;
        for (std::size_t j : b.sellers)
            if (pair.seller[j] != v) return false;
    }
    for (std::size_t i : event.dropped_buyers)
        if (pair.buyer[i] != event.observed.buyer[i]) return false;
    for (std::size_t j : event.dropped_sellers)
        if (pair.seller[j] != event.observed.seller[j]) return false;
    return true;
}

}  // namespace twosided
