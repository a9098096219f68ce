// Command-line front end: `twosided test | simulate | power`.
#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twosided/csv.hpp"
#include "twosided/engine.hpp"
#include "twosided/error.hpp"
#include "twosided/power.hpp"
#include "twosided/serialize.hpp"
#include "twosided/sim.hpp"

#ifndef TWOSIDED_VERSION
#define TWOSIDED_VERSION "0.0.0"
#endif

using nlohmann::json;
namespace ts = twosided;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitDegenerate = 3;

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream out;
    for (unsigned i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

// The embedded manifest omits the timestamp so that repeated runs produce
// identical output; the standalone manifest file carries it.
json manifest(const std::string& command, json parameters, std::uint64_t seed, json inputs) {
    return {{"command", command},
            {"parameters", std::move(parameters)},
            {"seed", seed},
            {"inputs", std::move(inputs)},
            {"tool_version", TWOSIDED_VERSION}};
}

void write_manifest(const std::string& path, json m, unsigned threads) {
    if (path.empty()) return;
    m["timestamp"] = utc_timestamp();
    m["threads"] = threads;
    std::ofstream out(path);
    if (!out) throw ts::ParseError("cannot write '" + path + "'");
    out << m.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ts::ParseError("cannot write '" + path + "'");
    out << text;
}

ts::Design parse_design(const std::string& spec, const ts::AssignmentPair& pair) {
    if (spec == "complete")
        return ts::Design::complete(pair.rows(), pair.buyer.treated_count(), pair.cols(),
                                    pair.seller.treated_count());
    if (spec.rfind("bernoulli:", 0) == 0) {
        const std::string args = spec.substr(10);
        const auto comma = args.find(',');
        if (comma == std::string::npos) throw ts::ParameterError("expected --design bernoulli:PB,PS");
        std::size_t used = 0;
        double pb = 0, ps = 0;
        try {
            pb = std::stod(args.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("pb");
            const std::string rest = args.substr(comma + 1);
            ps = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("ps");
        } catch (const std::logic_error&) {
            throw ts::ParameterError("expected --design bernoulli:PB,PS with numeric probabilities");
        }
        return ts::Design::bernoulli(pair.rows(), pair.cols(), pb, ps);
    }
    throw ts::ParameterError("unknown design '" + spec + "' (use complete or bernoulli:PB,PS)");
}

struct TestArgs {
    std::string outcomes, buyer, seller;
    std::string procedure = "buyer_spillover", statistic = "diff_means", sided = "upper";
    std::string resampler = "permutation", design = "complete";
    std::size_t k = 1;
    int L = 500;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    long long max_tries = 1'000'000;
    bool strict = false, strict_comparator = false;
    std::string reps_csv, manifest_path;
};

int run_test_command(const TestArgs& a) {
    const std::string y_text = ts::csv::read_file(a.outcomes);
    const std::string b_text = ts::csv::read_file(a.buyer);
    const std::string s_text = ts::csv::read_file(a.seller);
    auto prefixed = [](const std::string& path, auto&& parse) {
        try {
            return parse();
        } catch (const ts::ParseError& e) {
            throw ts::ParseError(path + ": " + e.what(), e.row(), e.column());
        }
    };
    const ts::OutcomeMatrix y =
        prefixed(a.outcomes, [&] { return ts::OutcomeMatrix(ts::csv::parse_matrix(y_text)); });
    ts::AssignmentPair pair{prefixed(a.buyer, [&] { return ts::csv::parse_assignment(b_text); }),
                            prefixed(a.seller, [&] { return ts::csv::parse_assignment(s_text); })};
    if (y.rows() != pair.rows() || y.cols() != pair.cols())
        throw ts::ShapeError("outcomes are " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                             " but the buyer/seller vectors have lengths " + std::to_string(pair.rows()) + " and " +
                             std::to_string(pair.cols()));

    ts::TestConfig config;
    config.procedure = ts::parse_procedure(a.procedure);
    config.statistic = ts::parse_statistic(a.statistic);
    config.replicates = a.L;
    config.alpha = a.alpha;
    config.k = a.k;
    config.sidedness = ts::parse_sidedness(a.sided);
    config.resampler = ts::parse_resampler(a.resampler);
    config.seed = a.seed;
    config.max_rejection_tries = a.max_tries;
    config.strict_comparator = a.strict_comparator;
    config.divisibility = a.strict ? ts::DivisibilityPolicy::strict : ts::DivisibilityPolicy::drop_surplus;
    config.threads = a.threads;
    ts::validate(config);

    // Surface degenerate events before the design rejects the same counts.
    if (config.procedure == ts::Procedure::total_effect)
        ts::build_k_block_event(pair, config.k, config.divisibility);
    else
        ts::build_spillover_event(pair, config.procedure == ts::Procedure::buyer_spillover ? ts::Side::buyer
                                                                                            : ts::Side::seller);

    const ts::Design design = parse_design(a.design, pair);
    const ts::TestResult result = ts::run_test(y, pair, design, config);

    json params = ts::to_json(config);
    params["design"] = design.name();
    const json inputs = {{"outcomes", {{"path", a.outcomes}, {"sha256", sha256_hex(y_text)}}},
                         {"buyer", {{"path", a.buyer}, {"sha256", sha256_hex(b_text)}}},
                         {"seller", {{"path", a.seller}, {"sha256", sha256_hex(s_text)}}}};
    const json m = manifest("test", params, a.seed, inputs);

    json out = ts::to_json(result);
    out["manifest"] = m;
    std::cout << out.dump(2) << '\n';

    if (!a.reps_csv.empty()) {
        std::string text;
        for (double x : result.t_reps) text += ts::csv::format_double(x) + '\n';
        write_text(a.reps_csv, text);
    }
    write_manifest(a.manifest_path, m, a.threads);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return kExitOk;
}

struct SimArgs {
    std::string config_path, regime = "sharp_null", sided, csv_path, json_path, manifest_path;
    std::optional<int> table;
    std::vector<std::size_t> n, k;
    std::optional<int> reps, L;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> procedures, methods;
    unsigned threads = 0;
    bool include_timing = false;
};

ts::SimConfig regime_config(const std::string& regime, std::size_t n) {
    if (regime == "sharp_null") return ts::sharp_null_config(n);
    if (regime == "alternative") return ts::alternative_config(n);
    if (regime == "weak_null") return ts::weak_null_config(n);
    if (regime == "weak_alternative") return ts::weak_alternative_config(n);
    throw ts::ParameterError("unknown regime '" + regime + "'");
}

void apply_overrides(ts::SimConfig& c, const SimArgs& a) {
    if (a.reps) c.reps = *a.reps;
    if (a.L) c.replicates = *a.L;
    if (a.alpha) c.alpha = *a.alpha;
    if (a.seed) c.seed = *a.seed;
    if (!a.sided.empty()) c.sidedness = ts::parse_sidedness(a.sided);
    if (!a.procedures.empty()) {
        c.procedures.clear();
        for (const auto& p : a.procedures) c.procedures.push_back(ts::parse_procedure(p));
    }
    if (!a.methods.empty()) {
        c.methods.clear();
        for (const auto& m : a.methods) c.methods.push_back(ts::parse_method(m));
    }
    c.threads = a.threads;
}

int run_simulate_command(const SimArgs& a) {
    std::vector<ts::SimConfig> configs;
    if (a.reps && *a.reps < 1) throw ts::ParameterError("--reps must be at least 1");
    if (a.L && *a.L < 1) throw ts::ParameterError("--L must be at least 1");
    if (a.table) {
        configs = ts::table_preset(*a.table, a.n, a.k, a.reps.value_or(5000), a.L.value_or(500), a.seed.value_or(0));
        for (auto& c : configs) {
            const std::uint64_t preset_seed = c.seed;
            apply_overrides(c, a);
            c.seed = preset_seed;
        }
    } else {
        ts::SimConfig base;
        if (!a.config_path.empty()) {
            json j;
            try {
                j = json::parse(ts::csv::read_file(a.config_path));
            } catch (const json::parse_error& e) {
                throw ts::ConfigError(a.config_path + ": " + e.what());
            }
            base = ts::sim_config_from_json(j);
        } else {
            base = regime_config(a.regime, a.n.empty() ? 10 : a.n.front());
        }
        const std::vector<std::size_t> ns = a.n.empty() ? std::vector<std::size_t>{base.n} : a.n;
        const std::vector<std::size_t> ks = a.k.empty() ? std::vector<std::size_t>{0} : a.k;
        for (std::size_t n : ns) {
            for (std::size_t k : ks) {
                ts::SimConfig c = base;
                if (c.n != n) {
                    const std::size_t default_k = std::max<std::size_t>(1, n / 4);
                    if (c.k == std::max<std::size_t>(1, c.n / 4)) c.k = default_k;
                    c.n = n;
                }
                if (k != 0) c.k = k;
                apply_overrides(c, a);
                configs.push_back(std::move(c));
            }
        }
    }
    for (const auto& c : configs) ts::validate(c);

    ts::SimReport report;
    json config_list = json::array();
    for (const auto& c : configs) {
        ts::append(report, ts::run_simulation(c));
        config_list.push_back(ts::to_json(c));
    }

    json params = {{"configs", config_list}};
    if (a.table) params["table"] = *a.table;
    const json m = manifest("simulate", params, a.seed.value_or(configs.front().seed), json::object());

    const std::string csv_text = ts::sim_report_csv(report);
    if (a.csv_path.empty())
        std::cout << csv_text;
    else
        write_text(a.csv_path, csv_text);
    if (!a.json_path.empty()) {
        json out = ts::to_json(report, a.include_timing);
        out["manifest"] = m;
        write_text(a.json_path, out.dump(2) + '\n');
    }
    write_manifest(a.manifest_path, m, a.threads);
    for (const auto& msg : report.failure_messages) std::cerr << "warning: replication failure: " << msg << '\n';
    if (a.include_timing) std::cerr << "runtime_seconds: " << report.runtime_seconds << '\n';
    return kExitOk;
}

struct PowerArgs {
    ts::PowerParams params;
    std::vector<std::size_t> k_list;
    bool k_list_given = false;
    bool recommend = false;
    bool figure3 = false;
    double beta = 0.95;
    std::string manifest_path;
};

int run_power_command(PowerArgs a, const CLI::App& cmd) {
    if (a.figure3) {
        if (cmd.count("--n") == 0) a.params.n = 400;
        if (cmd.count("--A") == 0) a.params.A = 1.0;
        if (cmd.count("--a") == 0) a.params.a = 0.01;
        if (cmd.count("--tau") == 0) a.params.tau = 0.01;
    }
    if (a.recommend) {
        std::cout << ts::recommend_k(a.params.n, a.beta) << '\n';
        write_manifest(a.manifest_path,
                       manifest("power", {{"n", a.params.n}, {"beta", a.beta}, {"recommend_k", true}}, 0,
                                json::object()),
                       1);
        return kExitOk;
    }
    if (a.k_list_given && a.k_list.empty()) throw ts::ParameterError("--k-list must not be empty");
    if (!a.k_list_given) a.k_list = ts::divisors(a.params.n);
    const ts::PowerCurve curve = ts::emit_power_curve(a.params, a.k_list);
    std::cout << ts::power_curve_csv(curve);
    for (const auto& w : curve.warnings) std::cerr << "warning: " << w << '\n';
    const json params = {{"n", a.params.n},         {"A", a.params.A},     {"a", a.params.a},
                         {"tau", a.params.tau},     {"c", a.params.c_order}, {"delta", a.params.delta},
                         {"eps", a.params.eps},     {"k_list", a.k_list}};
    write_manifest(a.manifest_path, manifest("power", params, 0, json::object()), 1);
    return kExitOk;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ts::DegenerateEventError*>(&e) || dynamic_cast<const ts::DegenerateArmError*>(&e) ||
        dynamic_cast<const ts::VarianceUndefinedError*>(&e))
        return kExitDegenerate;
    if (dynamic_cast<const ts::ParameterError*>(&e) || dynamic_cast<const ts::ShapeError*>(&e) ||
        dynamic_cast<const ts::ParseError*>(&e) || dynamic_cast<const ts::ConfigError*>(&e))
        return kExitInvalid;
    return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomization tests for two-sided marketplace experiments.\n"
                 "Matrices are headerless CSV with buyers as rows and sellers as columns;\n"
                 "assignment files hold one 0/1 row (or column)."};
    app.set_version_flag("--version", TWOSIDED_VERSION);
    app.require_subcommand(1);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Run a randomization test on observed data");
    test->add_option("outcomes", ta.outcomes, "Outcome matrix CSV (I rows x J columns)")->required();
    test->add_option("buyer", ta.buyer, "Buyer assignment CSV (length I)")->required();
    test->add_option("seller", ta.seller, "Seller assignment CSV (length J)")->required();
    test->add_option("--procedure", ta.procedure, "buyer_spillover | seller_spillover | total_effect")
        ->capture_default_str();
    test->add_option("--statistic", ta.statistic, "diff_means | studentized")->capture_default_str();
    test->add_option("--k", ta.k, "Block size for total_effect")->capture_default_str();
    test->add_option("--L", ta.L, "Number of randomization replicates")->capture_default_str();
    test->add_option("--alpha", ta.alpha, "Significance level")->capture_default_str();
    test->add_option("--sided", ta.sided, "upper | two_sided")->capture_default_str();
    test->add_option("--resampler", ta.resampler, "permutation | conditional_rejection")->capture_default_str();
    test->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
    test->add_option("--design", ta.design, "complete | bernoulli:PB,PS")->capture_default_str();
    test->add_option("--threads", ta.threads, "Worker cap (0: TWOSIDED_THREADS or hardware)");
    test->add_option("--max-tries", ta.max_tries, "Rejection sampler try budget")->capture_default_str();
    test->add_flag("--strict", ta.strict, "Refuse k that would drop units");
    test->add_flag("--strict-comparator", ta.strict_comparator, "Count T > t_obs instead of T >= t_obs");
    test->add_option("--reps-csv", ta.reps_csv, "Write replicate statistics to this file");
    test->add_option("--manifest", ta.manifest_path, "Write the run manifest to this file");

    SimArgs sa;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection rates");
    sim->add_option("--config", sa.config_path, "Simulation config JSON");
    sim->add_option("--table", sa.table, "Table preset 1-4")->check(CLI::Range(1, 4));
    sim->add_option("--regime", sa.regime, "sharp_null | alternative | weak_null | weak_alternative")
        ->capture_default_str();
    sim->add_option("--n", sa.n, "Half-side size(s); I = J = 3n")->delimiter(',');
    sim->add_option("--k", sa.k, "Block size(s) for total_effect")->delimiter(',');
    sim->add_option("--reps", sa.reps, "Monte Carlo replications");
    sim->add_option("--L", sa.L, "Randomization replicates per test");
    sim->add_option("--alpha", sa.alpha, "Significance level");
    sim->add_option("--seed", sa.seed, "Random seed");
    sim->add_option("--sided", sa.sided, "upper | two_sided");
    sim->add_option("--procedures", sa.procedures, "Comma-separated procedures")->delimiter(',');
    sim->add_option("--methods", sa.methods, "Comma-separated methods: frt, frt_adjusted, neymanian")
        ->delimiter(',');
    sim->add_option("--threads", sa.threads, "Worker cap (0: TWOSIDED_THREADS or hardware)");
    sim->add_option("--csv", sa.csv_path, "Write the CSV report here instead of stdout");
    sim->add_option("--json", sa.json_path, "Write the JSON report here");
    sim->add_option("--manifest", sa.manifest_path, "Write the run manifest to this file");
    sim->add_flag("--include-timing", sa.include_timing, "Include runtime in the JSON report");

    PowerArgs pa;
    auto* power = app.add_subcommand("power", "Power lower bound over block sizes");
    power->add_option("--n", pa.params.n, "Half-side size (I = J = 2n)")->capture_default_str();
    power->add_option("--A", pa.params.A, "Bound constant A")->capture_default_str();
    power->add_option("--a", pa.params.a, "Bound constant a")->capture_default_str();
    power->add_option("--tau", pa.params.tau, "Effect scale")->capture_default_str();
    power->add_option("--c", pa.params.c_order, "Constant of the finite-sample term")->capture_default_str();
    power->add_option("--delta", pa.params.delta, "Exponent slack delta")->capture_default_str();
    power->add_option("--eps", pa.params.eps, "Additive slack eps")->capture_default_str();
    auto* klist = power->add_option("--k-list", pa.k_list, "Comma-separated block sizes")->delimiter(',');
    klist->expected(0, CLI::detail::expected_max_vector_size);
    klist->allow_extra_args(false);
    power->add_flag("--recommend-k", pa.recommend, "Print the heuristic block size");
    power->add_option("--beta", pa.beta, "Target power for --recommend-k")->capture_default_str();
    power->add_flag("--figure3", pa.figure3, "Preset n=400, A=1, a=tau=0.01");
    power->add_option("--manifest", pa.manifest_path, "Write the run manifest to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (test->parsed()) return run_test_command(ta);
        if (sim->parsed()) return run_simulate_command(sa);
        if (power->parsed()) {
            pa.k_list_given = klist->count() > 0 || !klist->results().empty();
            return run_power_command(pa, *power);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOther;
}
