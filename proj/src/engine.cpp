#include "twosided/engine.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <type_traits>

#include "twosided/error.hpp"
#include "twosided/parallel.hpp"

namespace twosided {

std::string to_string(Procedure p) {
    switch (p) {
        case Procedure::buyer_spillover: return "buyer_spillover";
        case Procedure::seller_spillover: return "seller_spillover";
        case Procedure::total_effect: return "total_effect";
    }
    return "?";
}

std::string to_string(Sidedness s) { return s == Sidedness::upper ? "upper" : "two_sided"; }

std::string to_string(ResamplerKind r) {
    return r == ResamplerKind::permutation ? "permutation" : "conditional_rejection";
}

Procedure parse_procedure(const std::string& s) {
    if (s == "buyer_spillover") return Procedure::buyer_spillover;
    if (s == "seller_spillover") return Procedure::seller_spillover;
    if (s == "total_effect" || s == "total") return Procedure::total_effect;
    throw ParameterError("unknown procedure '" + s + "'");
}

Sidedness parse_sidedness(const std::string& s) {
    if (s == "upper") return Sidedness::upper;
    if (s == "two_sided" || s == "two-sided") return Sidedness::two_sided;
    throw ParameterError("unknown sidedness '" + s + "'");
}

ResamplerKind parse_resampler(const std::string& s) {
    if (s == "permutation") return ResamplerKind::permutation;
    if (s == "conditional_rejection" || s == "rejection") return ResamplerKind::conditional_rejection;
    throw ParameterError("unknown resampler '" + s + "'");
}

StatisticKind parse_statistic(const std::string& s) {
    if (s == "diff_means") return StatisticKind::diff_means;
    if (s == "studentized") return StatisticKind::studentized;
    throw ParameterError("unknown statistic '" + s + "'");
}

void validate(const TestConfig& config) {
    if (config.replicates < 1) throw ParameterError("L must be at least 1");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (config.procedure == Procedure::total_effect && config.k < 1)
        throw ParameterError("block size k must be at least 1");
    if (config.max_rejection_tries < 1) throw ParameterError("max_rejection_tries must be positive");
}

double randomization_p_value(double t_obs, std::span<const double> reps, Sidedness sidedness, bool strict,
                             std::size_t* exceed_count) {
    std::size_t count = 0;
    if (std::isnan(t_obs)) {
        count = reps.size();
    } else {
        const double t = sidedness == Sidedness::two_sided ? std::fabs(t_obs) : t_obs;
        for (double x : reps) {
            if (std::isnan(x)) continue;
            const double v = sidedness == Sidedness::two_sided ? std::fabs(x) : x;
            if (strict ? v > t : v >= t) ++count;
        }
    }
    if (exceed_count) *exceed_count = count;
    return (1.0 + static_cast<double>(count)) / (static_cast<double>(reps.size()) + 1.0);
}

namespace {

std::vector<std::uint8_t> permuted(std::span<const std::uint8_t> observed, std::uint64_t seed,
                                   std::uint64_t rep_index) {
    std::vector<std::uint8_t> labels(observed.begin(), observed.end());
    Rng rng(seed, rep_index);
    rng.shuffle(std::span<std::uint8_t>(labels));
    return labels;
}

std::vector<std::uint8_t> observed_block_labels(const KBlockEvent& event) {
    std::vector<std::uint8_t> labels;
    labels.reserve(event.block_count());
    for (const Block& b : event.blocks) labels.push_back(b.label == BlockLabel::treated ? 1 : 0);
    return labels;
}

AssignmentPair spillover_pair(const SpilloverEvent& event, std::vector<std::uint8_t> randomized) {
    AssignmentPair pair;
    pair.side(event.side) = AssignmentVector(std::move(randomized));
    pair.side(event.fixed_side()) = event.fixed_vector;
    return pair;
}

AssignmentPair block_pair(const KBlockEvent& event, std::span<const std::uint8_t> labels) {
    auto buyer = std::vector<std::uint8_t>(event.observed.buyer.bits().begin(), event.observed.buyer.bits().end());
    auto seller =
        std::vector<std::uint8_t>(event.observed.seller.bits().begin(), event.observed.seller.bits().end());
    for (std::size_t b = 0; b < event.block_count(); ++b) {
        for (std::size_t i : event.blocks[b].buyers) buyer[i] = labels[b];
        for (std::size_t j : event.blocks[b].sellers) seller[j] = labels[b];
    }
    return AssignmentPair{AssignmentVector(std::move(buyer)), AssignmentVector(std::move(seller))};
}

[[noreturn]] void exhausted(long long tries) {
    throw SamplerExhaustedError("conditional rejection sampler exhausted: 0 acceptances in " +
                                    std::to_string(tries) + " tries (acceptance rate < " +
                                    std::to_string(1.0 / static_cast<double>(tries)) + ")",
                                tries, 0);
}

void check_design(const Design& design, std::size_t rows, std::size_t cols) {
    if (design.size(Side::buyer) != rows || design.size(Side::seller) != cols)
        throw ShapeError("design is " + std::to_string(design.size(Side::buyer)) + "x" +
                         std::to_string(design.size(Side::seller)) + " but the data are " + std::to_string(rows) +
                         "x" + std::to_string(cols));
}

#ifndef NDEBUG
constexpr bool kDebugChecks = true;
#else
constexpr bool kDebugChecks = false;
#endif

}  // namespace

AssignmentPair resample_spillover_permutation(const SpilloverEvent& event, std::uint64_t seed,
                                              std::uint64_t rep_index) {
    return spillover_pair(event, permuted(event.observed_free.bits(), seed, rep_index));
}

AssignmentPair resample_blocks_permutation(const KBlockEvent& event, std::uint64_t seed, std::uint64_t rep_index) {
    const auto labels = permuted(observed_block_labels(event), seed, rep_index);
    return block_pair(event, labels);
}

AssignmentPair resample_conditional_rejection(const Design& design, const SpilloverEvent& event,
                                              std::uint64_t seed, std::uint64_t rep_index, long long max_tries) {
    check_design(design, event.rows, event.cols);
    Rng rng(seed, rep_index);
    for (long long t = 0; t < max_tries; ++t) {
        AssignmentVector v = design.sample_side(event.side, rng);
        if (v.treated_count() == event.free_count) {
            AssignmentPair pair;
            pair.side(event.side) = std::move(v);
            pair.side(event.fixed_side()) = event.fixed_vector;
            return pair;
        }
    }
    exhausted(max_tries);
}

AssignmentPair resample_conditional_rejection(const Design& design, const KBlockEvent& event, std::uint64_t seed,
                                              std::uint64_t rep_index, long long max_tries) {
    check_design(design, event.rows, event.cols);
    // Draw the buyer side and accept when it preserves the treated count,
    // leaves unblocked buyers at their observed value and is constant within
    // every block; each seller group then inherits its block's label.
    Rng rng(seed, rep_index);
    const std::size_t target = event.observed.buyer.treated_count();
    for (long long t = 0; t < max_tries; ++t) {
        const AssignmentVector v = design.sample_side(Side::buyer, rng);
        if (v.treated_count() != target) continue;
        bool ok = true;
        for (std::size_t i : event.dropped_buyers)
            if (v[i] != event.observed.buyer[i]) { ok = false; break; }
        std::vector<std::uint8_t> labels;
        labels.reserve(event.block_count());
        for (const Block& b : event.blocks) {
            if (!ok) break;
            const std::uint8_t l = v[b.buyers.front()];
            for (std::size_t i : b.buyers)
                if (v[i] != l) { ok = false; break; }
            labels.push_back(l);
        }
        if (ok) return block_pair(event, labels);
    }
    exhausted(max_tries);
}

TestResult run_test(const OutcomeMatrix& y, const AssignmentPair& pair, const Design& design,
                    const TestConfig& config) {
    validate(config);
    if (config.resampler == ResamplerKind::permutation && !design.exchangeable())
        throw ConfigError("permutation resampling requires an exchangeable design; use conditional_rejection");
    if (y.rows() != pair.rows() || y.cols() != pair.cols())
        throw ShapeError("outcomes are " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                         " but assignments are " + std::to_string(pair.rows()) + "x" + std::to_string(pair.cols()));
    check_design(design, pair.rows(), pair.cols());

    TestResult result;
    result.config = config;

    RowAggregate agg;
    std::vector<std::uint8_t> observed_labels;
    if (config.procedure == Procedure::total_effect) {
        KBlockEvent event = build_k_block_event(pair, config.k, config.divisibility);
        agg = block_aggregates(y, event);
        observed_labels = observed_block_labels(event);
        result.event = std::move(event);
    } else {
        const Side side = config.procedure == Procedure::buyer_spillover ? Side::buyer : Side::seller;
        SpilloverEvent event = build_spillover_event(pair, side);
        agg = spillover_aggregates(y, event);
        observed_labels.assign(event.observed_free.bits().begin(), event.observed_free.bits().end());
        result.event = std::move(event);
    }

    try {
        result.t_obs = evaluate(config.statistic, agg, observed_labels);
    } catch (const ZeroVarianceError&) {
        result.t_obs = std::numeric_limits<double>::quiet_NaN();
        result.warnings.push_back("observed statistic has zero variance; p-value set to 1");
    }

    const auto L = static_cast<std::size_t>(config.replicates);
    result.t_reps.assign(L, 0.0);
    std::atomic<std::size_t> zero_variance{0};

    auto replicate_labels = [&](std::size_t l) -> std::vector<std::uint8_t> {
        if (config.resampler == ResamplerKind::permutation) {
            auto labels = permuted(observed_labels, config.seed, l);
            if constexpr (kDebugChecks) {
                std::visit(
                    [&](const auto& e) {
                        using E = std::decay_t<decltype(e)>;
                        if constexpr (std::is_same_v<E, KBlockEvent>) {
                            assert(admissible(e, block_pair(e, labels)));
                        } else {
                            assert(admissible(e, spillover_pair(e, labels)));
                        }
                    },
                    result.event);
            }
            return labels;
        }
        return std::visit(
            [&](const auto& e) {
                AssignmentPair resampled =
                    resample_conditional_rejection(design, e, config.seed, l, config.max_rejection_tries);
                assert(admissible(e, resampled));
                return unit_labels(e, resampled);
            },
            result.event);
    };

    parallel_for(L, config.threads, [&](std::size_t l) {
        const auto labels = replicate_labels(l);
        try {
            result.t_reps[l] = evaluate(config.statistic, agg, labels);
        } catch (const ZeroVarianceError&) {
            result.t_reps[l] = std::numeric_limits<double>::quiet_NaN();
            zero_variance.fetch_add(1, std::memory_order_relaxed);
        }
    });
    if (const std::size_t z = zero_variance.load(); z > 0)
        result.warnings.push_back(std::to_string(z) + " replicate(s) had zero variance and count as non-exceeding");

    if (std::isnan(result.t_obs)) {
        result.p_value = 1.0;
        result.exceed_count = L;
    } else {
        result.p_value =
            randomization_p_value(result.t_obs, result.t_reps, config.sidedness, config.strict_comparator,
                                  &result.exceed_count);
    }
    result.reject = result.p_value <= config.alpha;
    return result;
}

}  // namespace twosided
