#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twosided/conditioning.hpp"
#include "twosided/core.hpp"
#include "twosided/statistics.hpp"

namespace twosided {

enum class Procedure { buyer_spillover, seller_spillover, total_effect };
enum class Sidedness { upper, two_sided };
enum class ResamplerKind { permutation, conditional_rejection };

std::string to_string(Procedure p);
std::string to_string(Sidedness s);
std::string to_string(ResamplerKind r);
Procedure parse_procedure(const std::string& s);
Sidedness parse_sidedness(const std::string& s);
ResamplerKind parse_resampler(const std::string& s);
StatisticKind parse_statistic(const std::string& s);

struct TestConfig {
    Procedure procedure = Procedure::buyer_spillover;
    StatisticKind statistic = StatisticKind::diff_means;
    int replicates = 500;  // L
    double alpha = 0.05;
    std::size_t k = 1;     // total_effect only
    Sidedness sidedness = Sidedness::upper;
    ResamplerKind resampler = ResamplerKind::permutation;
    std::uint64_t seed = 0;
    long long max_rejection_tries = 1'000'000;
    // Count replicates with T > t_obs instead of T >= t_obs.
    bool strict_comparator = false;
    DivisibilityPolicy divisibility = DivisibilityPolicy::drop_surplus;
    // 0 selects the default worker cap (TWOSIDED_THREADS or hardware).
    unsigned threads = 1;
};

struct TestResult {
    double t_obs = 0.0;           // NaN when the observed statistic is undefined (zero variance)
    std::vector<double> t_reps;   // NaN marks a replicate whose statistic was undefined
    std::size_t exceed_count = 0;
    double p_value = 1.0;
    bool reject = false;
    ConditioningEvent event;
    TestConfig config;
    std::vector<std::string> warnings;
};

/// Throws ParameterError for L < 1, alpha outside (0,1), k < 1, ...
void validate(const TestConfig& config);

/// (1 + #{l : T_l >= t_obs}) / (L + 1), with |.| for two-sided and > for the
/// strict comparator. NaN replicates never count as exceeding.
double randomization_p_value(double t_obs, std::span<const double> reps, Sidedness sidedness,
                             bool strict, std::size_t* exceed_count = nullptr);

/// Uniform permutation of the randomized side; the fixed side is unchanged.
AssignmentPair resample_spillover_permutation(const SpilloverEvent& event, std::uint64_t seed,
                                              std::uint64_t rep_index);

/// Uniform permutation of block labels; units outside blocks keep their
/// observed assignment.
AssignmentPair resample_blocks_permutation(const KBlockEvent& event, std::uint64_t seed,
                                           std::uint64_t rep_index);

/// Draw from the marginal design until the event's constraints hold.
AssignmentPair resample_conditional_rejection(const Design& design, const SpilloverEvent& event,
                                              std::uint64_t seed, std::uint64_t rep_index,
                                              long long max_tries);
AssignmentPair resample_conditional_rejection(const Design& design, const KBlockEvent& event,
                                              std::uint64_t seed, std::uint64_t rep_index,
                                              long long max_tries);

/// Builds the event for config.procedure, computes the observed statistic and
/// L replicates, and forms the randomization p-value.
TestResult run_test(const OutcomeMatrix& y, const AssignmentPair& pair, const Design& design,
                    const TestConfig& config);

}  // namespace twosided
