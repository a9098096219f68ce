#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twosided/core.hpp"
#include "twosided/engine.hpp"

namespace twosided {

enum class SimMethod { frt, frt_adjusted, neymanian };

std::string to_string(SimMethod m);
SimMethod parse_method(const std::string& s);

/// One data-generating regime of the simulation study: I = J = 3n with n
/// treated on each side, Y(w, h) = F0 + F_(w,h) with independent normal
/// components and the F0 draw shared by the four exposure cases of a cell.
struct SimConfig {
    std::string regime = "custom";
    std::size_t n = 10;
    double mu0 = 0.0, muB = 0.0, muS = 0.0, mu1 = 0.0;
    double sigma0 = 0.2, sigmaB = 0.0, sigmaS = 0.0, sigma1 = 0.0;
    int reps = 5000;
    int replicates = 500;  // L
    double alpha = 0.05;
    std::size_t k = 1;
    std::vector<Procedure> procedures{Procedure::buyer_spillover, Procedure::total_effect};
    std::vector<SimMethod> methods{SimMethod::frt, SimMethod::frt_adjusted, SimMethod::neymanian};
    Sidedness sidedness = Sidedness::two_sided;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0: default worker cap
};

void validate(const SimConfig& config);

/// Regime presets.
SimConfig sharp_null_config(std::size_t n);
SimConfig alternative_config(std::size_t n);
SimConfig weak_null_config(std::size_t n);
SimConfig weak_alternative_config(std::size_t n);

struct SimRow {
    std::string regime;
    Procedure procedure = Procedure::buyer_spillover;
    SimMethod method = SimMethod::frt;
    std::size_t n = 0;
    std::size_t k = 0;  // 0 for spillover rows
    int reps = 0;
    int completed = 0;
    int failures = 0;
    int rejections = 0;
    double rate = 0.0;  // rejections / completed
    double mc_se = 0.0;
};

struct SimReport {
    std::vector<SimRow> rows;
    double runtime_seconds = 0.0;
    std::vector<std::string> failure_messages;  // first few distinct messages
};

PotentialOutcomeSchedule generate_schedule(const SimConfig& config, std::uint64_t seed);

/// Declared comparator for the Neymanian t-test: the studentized statistic
/// against the standard normal (upper z_{1-alpha} or two-sided z_{1-alpha/2}).
bool neymanian_test(const OutcomeMatrix& y, const AssignmentPair& pair, const SpilloverEvent& event,
                    double alpha, Sidedness sidedness = Sidedness::upper);
bool neymanian_test(const OutcomeMatrix& y, const AssignmentPair& pair, const KBlockEvent& event,
                    double alpha, Sidedness sidedness = Sidedness::upper);

SimReport run_simulation(const SimConfig& config);

/// Concatenate reports (used by table presets).
void append(SimReport& into, const SimReport& from);

/// Table presets: the list of configurations that make up tables 1-4.
/// n_values / k_values override the defaults when non-empty.
std::vector<SimConfig> table_preset(int table, const std::vector<std::size_t>& n_values,
                                    const std::vector<std::size_t>& k_values, int reps, int replicates,
                                    std::uint64_t seed);

std::string sim_report_csv(const SimReport& report);

}  // namespace twosided
