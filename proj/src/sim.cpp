#include "twosided/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>

#include "twosided/csv.hpp"
#include "twosided/error.hpp"
#include "twosided/numeric.hpp"
#include "twosided/parallel.hpp"

namespace twosided {

std::string to_string(SimMethod m) {
    switch (m) {
        case SimMethod::frt: return "frt";
        case SimMethod::frt_adjusted: return "frt_adjusted";
        case SimMethod::neymanian: return "neymanian";
    }
    return "?";
}

SimMethod parse_method(const std::string& s) {
    if (s == "frt") return SimMethod::frt;
    if (s == "frt_adjusted" || s == "adjusted") return SimMethod::frt_adjusted;
    if (s == "neymanian") return SimMethod::neymanian;
    throw ParameterError("unknown method '" + s + "'");
}

void validate(const SimConfig& c) {
    if (c.n < 2) throw ParameterError("n must be at least 2");
    for (double mu : {c.mu0, c.muB, c.muS, c.mu1})
        if (!std::isfinite(mu)) throw ParameterError("means must be finite");
    for (double s : {c.sigma0, c.sigmaB, c.sigmaS, c.sigma1})
        if (!(s >= 0.0) || !std::isfinite(s)) throw ParameterError("standard deviations must be finite and >= 0");
    if (c.reps < 1) throw ParameterError("reps must be at least 1");
    if (c.replicates < 1) throw ParameterError("L must be at least 1");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (c.procedures.empty()) throw ParameterError("at least one procedure is required");
    if (c.methods.empty()) throw ParameterError("at least one method is required");
    const bool total = std::find(c.procedures.begin(), c.procedures.end(), Procedure::total_effect) != c.procedures.end();
    if (total && (c.k < 1 || c.k > c.n))
        throw ParameterError("block size k=" + std::to_string(c.k) + " must lie in [1, " + std::to_string(c.n) + "]");
}

SimConfig sharp_null_config(std::size_t n) {
    SimConfig c;
    c.regime = "sharp_null";
    c.n = n;
    c.k = std::max<std::size_t>(1, n / 4);
    return c;
}

SimConfig alternative_config(std::size_t n) {
    SimConfig c = sharp_null_config(n);
    c.regime = "alternative";
    c.muB = 0.01;
    c.mu1 = 0.02;
    return c;
}

SimConfig weak_null_config(std::size_t n) {
    SimConfig c = sharp_null_config(n);
    c.regime = "weak_null";
    c.sigmaB = 0.4;
    c.sigma1 = 0.4;
    return c;
}

SimConfig weak_alternative_config(std::size_t n) {
    SimConfig c = weak_null_config(n);
    c.regime = "weak_alternative";
    c.muB = 0.01;
    c.mu1 = 0.02;
    return c;
}

PotentialOutcomeSchedule generate_schedule(const SimConfig& c, std::uint64_t seed) {
    const std::size_t m = 3 * c.n;
    Matrix y00(m, m), y10(m, m), y01(m, m), y11(m, m);
    Rng rng(seed, 0);
    auto draw = [&rng](double mu, double sigma) { return sigma > 0.0 ? mu + sigma * rng.normal() : mu; };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double base = draw(c.mu0, c.sigma0);
            y00(i, j) = base;
            y10(i, j) = base + draw(c.muB, c.sigmaB);
            y01(i, j) = base + draw(c.muS, c.sigmaS);
            y11(i, j) = base + draw(c.mu1, c.sigma1);
        }
    }
    return PotentialOutcomeSchedule(std::move(y00), std::move(y10), std::move(y01), std::move(y11));
}

namespace {

bool neymanian_decision(const RowAggregate& agg, std::span<const std::uint8_t> labels, double alpha,
                        Sidedness sidedness) {
    double t;
    try {
        t = studentized(agg, labels);
    } catch (const ZeroVarianceError&) {
        return false;
    }
    if (sidedness == Sidedness::two_sided) return std::fabs(t) > normal_upper_quantile(alpha / 2.0);
    return t > normal_upper_quantile(alpha);
}

std::vector<std::uint8_t> block_labels(const KBlockEvent& event) {
    std::vector<std::uint8_t> labels;
    for (const Block& b : event.blocks) labels.push_back(b.label == BlockLabel::treated ? 1 : 0);
    return labels;
}

enum Outcome : std::uint8_t { kAccept = 0, kReject = 1, kFailed = 2 };

}  // namespace

bool neymanian_test(const OutcomeMatrix& y, const AssignmentPair& pair, const SpilloverEvent& event,
                    double alpha, Sidedness sidedness) {
    return neymanian_decision(spillover_aggregates(y, event), unit_labels(event, pair), alpha, sidedness);
}

bool neymanian_test(const OutcomeMatrix& y, const AssignmentPair& pair, const KBlockEvent& event,
                    double alpha, Sidedness sidedness) {
    return neymanian_decision(block_aggregates(y, event), unit_labels(event, pair), alpha, sidedness);
}

SimReport run_simulation(const SimConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t m = 3 * config.n;
    const Design design = Design::complete(m, config.n, m, config.n);
    const std::size_t cells = config.procedures.size() * config.methods.size();
    const auto reps = static_cast<std::size_t>(config.reps);

    std::vector<std::uint8_t> outcomes(reps * cells, kFailed);
    std::vector<std::string> messages;
    std::mutex message_mutex;

    auto record_failure = [&](const std::string& what) {
        std::lock_guard lock(message_mutex);
        if (messages.size() < 5 && std::find(messages.begin(), messages.end(), what) == messages.end())
            messages.push_back(what);
    };

    parallel_for(reps, config.threads, [&](std::size_t r) {
        const std::uint64_t rep_seed = derive_seed(config.seed, r);
        std::uint8_t* slot = outcomes.data() + r * cells;
        try {
            const auto schedule = generate_schedule(config, derive_seed(rep_seed, "schedule"));
            const AssignmentPair pair = sample_design(design, derive_seed(rep_seed, "design"));
            const OutcomeMatrix y = realize_outcomes(schedule, pair);
            const std::uint64_t test_seed = derive_seed(rep_seed, "test");

            for (std::size_t p = 0; p < config.procedures.size(); ++p) {
                const Procedure procedure = config.procedures[p];
                for (std::size_t q = 0; q < config.methods.size(); ++q) {
                    std::uint8_t& out = slot[p * config.methods.size() + q];
                    try {
                        const SimMethod method = config.methods[q];
                        bool reject;
                        if (method == SimMethod::neymanian) {
                            if (procedure == Procedure::total_effect) {
                                const auto event = build_k_block_event(pair, config.k);
                                reject = neymanian_decision(block_aggregates(y, event), block_labels(event),
                                                            config.alpha, config.sidedness);
                            } else {
                                const Side side =
                                    procedure == Procedure::buyer_spillover ? Side::buyer : Side::seller;
                                const auto event = build_spillover_event(pair, side);
                                reject = neymanian_decision(spillover_aggregates(y, event),
                                                            event.observed_free.bits(), config.alpha,
                                                            config.sidedness);
                            }
                        } else {
                            TestConfig tc;
                            tc.procedure = procedure;
                            tc.statistic =
                                method == SimMethod::frt ? StatisticKind::diff_means : StatisticKind::studentized;
                            tc.replicates = config.replicates;
                            tc.alpha = config.alpha;
                            tc.k = config.k;
                            tc.sidedness = config.sidedness;
                            tc.seed = test_seed;
                            tc.threads = 1;
                            reject = run_test(y, pair, design, tc).reject;
                        }
                        out = reject ? kReject : kAccept;
                    } catch (const std::exception& e) {
                        out = kFailed;
                        record_failure(e.what());
                    }
                }
            }
        } catch (const std::exception& e) {
            std::fill_n(slot, cells, kFailed);
            record_failure(e.what());
        }
    });

    SimReport report;
    for (std::size_t p = 0; p < config.procedures.size(); ++p) {
        for (std::size_t q = 0; q < config.methods.size(); ++q) {
            SimRow row;
            row.regime = config.regime;
            row.procedure = config.procedures[p];
            row.method = config.methods[q];
            row.n = config.n;
            row.k = row.procedure == Procedure::total_effect ? config.k : 0;
            row.reps = config.reps;
            for (std::size_t r = 0; r < reps; ++r) {
                const std::uint8_t o = outcomes[r * cells + p * config.methods.size() + q];
                if (o == kFailed) {
                    ++row.failures;
                } else {
                    ++row.completed;
                    if (o == kReject) ++row.rejections;
                }
            }
            if (row.completed > 0) {
                row.rate = static_cast<double>(row.rejections) / row.completed;
                row.mc_se = std::sqrt(row.rate * (1.0 - row.rate) / row.completed);
            }
            report.rows.push_back(row);
        }
    }
    report.failure_messages = std::move(messages);
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void append(SimReport& into, const SimReport& from) {
    into.rows.insert(into.rows.end(), from.rows.begin(), from.rows.end());
    into.runtime_seconds += from.runtime_seconds;
    for (const auto& msg : from.failure_messages)
        if (std::find(into.failure_messages.begin(), into.failure_messages.end(), msg) == into.failure_messages.end())
            into.failure_messages.push_back(msg);
}

std::vector<SimConfig> table_preset(int table, const std::vector<std::size_t>& n_values,
                                    const std::vector<std::size_t>& k_values, int reps, int replicates,
                                    std::uint64_t seed) {
    using Maker = SimConfig (*)(std::size_t);
    const std::vector<std::size_t> default_n{10, 20, 30, 40, 50, 100};
    const std::vector<std::size_t> default_k{1, 2, 4, 5, 10, 20, 25, 50};
    std::vector<std::pair<const char*, Maker>> regimes;
    std::vector<std::size_t> ns;
    std::vector<Procedure> procedures;
    std::vector<SimMethod> methods;
    bool sweep_k = false;

    switch (table) {
        case 1:
            regimes = {{"sharp_null", sharp_null_config}, {"alternative", alternative_config}};
            ns = default_n;
            procedures = {Procedure::buyer_spillover, Procedure::total_effect};
            methods = {SimMethod::frt, SimMethod::frt_adjusted, SimMethod::neymanian};
            break;
        case 2:
            regimes = {{"sharp_null", sharp_null_config}, {"alternative", alternative_config}};
            ns = {100};
            procedures = {Procedure::total_effect};
            methods = {SimMethod::frt, SimMethod::frt_adjusted};
            sweep_k = true;
            break;
        case 3:
            regimes = {{"weak_null", weak_null_config}, {"weak_alternative", weak_alternative_config}};
            ns = default_n;
            procedures = {Procedure::buyer_spillover, Procedure::total_effect};
            methods = {SimMethod::frt, SimMethod::frt_adjusted, SimMethod::neymanian};
            break;
        case 4:
            regimes = {{"weak_null", weak_null_config}, {"weak_alternative", weak_alternative_config}};
            ns = {100};
            procedures = {Procedure::total_effect};
            methods = {SimMethod::frt, SimMethod::frt_adjusted};
            sweep_k = true;
            break;
        default:
            throw ParameterError("table must be 1, 2, 3 or 4");
    }
    if (!n_values.empty()) ns = n_values;

    std::vector<SimConfig> configs;
    for (const auto& [label, make] : regimes) {
        for (std::size_t n : ns) {
            std::vector<std::size_t> ks;
            if (!k_values.empty())
                ks = k_values;
            else if (sweep_k)
                ks = default_k;
            else
                ks = {table == 3 ? std::size_t{2} : std::max<std::size_t>(1, n / 4)};
            for (std::size_t ki = 0; ki < ks.size(); ++ki) {
                SimConfig c = make(n);
                c.k = ks[ki];
                c.reps = reps;
                c.replicates = replicates;
                c.procedures = procedures;
                // Spillover rows do not depend on k; emit them once per n.
                if (ki > 0) c.procedures.erase(std::remove(c.procedures.begin(), c.procedures.end(),
                                                           Procedure::buyer_spillover),
                                               c.procedures.end());
                if (c.procedures.empty()) continue;
                c.methods = methods;
                c.seed = derive_seed(seed, label);
                configs.push_back(std::move(c));
            }
        }
    }
    return configs;
}

std::string sim_report_csv(const SimReport& report) {
    std::ostringstream out;
    out << "regime,procedure,method,n,k,reps,completed,failures,rejections,rate,mc_se\n";
    for (const SimRow& r : report.rows)
        out << r.regime << ',' << to_string(r.procedure) << ',' << to_string(r.method) << ',' << r.n << ','
            << r.k << ',' << r.reps << ',' << r.completed << ',' << r.failures << ',' << r.rejections << ','
            << csv::format_double(r.rate) << ',' << csv::format_double(r.mc_se) << '\n';
    return out.str();
}

}  // namespace twosided
