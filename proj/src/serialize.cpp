#include "twosided/serialize.hpp"

#include <cmath>
#include <set>

#include "twosided/error.hpp"

namespace twosided {

using nlohmann::json;

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::size_t count_value(const json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = j.at(key).get<long long>();
    if (v < 0) throw ConfigError(std::string(key) + " must be non-negative");
    return static_cast<std::size_t>(v);
}

std::string divisibility_name(DivisibilityPolicy p) {
    return p == DivisibilityPolicy::strict ? "strict" : "drop_surplus";
}

}  // namespace

json to_json(const SpilloverEvent& e) {
    return {{"type", "spillover"},
            {"randomized_side", to_string(e.side)},
            {"rows", e.rows},
            {"cols", e.cols},
            {"treated_randomized", e.free_count},
            {"focal_fixed", e.focal_fixed},
            {"focal_count", e.focal_count()},
            {"log_support", support_size_log(e)}};
}

json to_json(const KBlockEvent& e) {
    json blocks = json::array();
    for (const Block& b : e.blocks)
        blocks.push_back({{"buyers", b.buyers},
                          {"sellers", b.sellers},
                          {"label", b.label == BlockLabel::treated ? 1 : 0}});
    return {{"type", "k_block"},
            {"k", e.k},
            {"rows", e.rows},
            {"cols", e.cols},
            {"block_count", e.block_count()},
            {"treated_block_count", e.treated_block_count},
            {"control_block_count", e.control_block_count()},
            {"dropped_buyers", e.dropped_buyers},
            {"dropped_sellers", e.dropped_sellers},
            {"focal_count", e.focal_count()},
            {"log_support", support_size_log(e)},
            {"blocks", blocks}};
}

json to_json(const ConditioningEvent& event) {
    return std::visit([](const auto& e) { return to_json(e); }, event);
}

json to_json(const TestConfig& c) {
    json j = {{"procedure", to_string(c.procedure)},
              {"statistic", to_string(c.statistic)},
              {"L", c.replicates},
              {"alpha", c.alpha},
              {"sidedness", to_string(c.sidedness)},
              {"resampler", to_string(c.resampler)},
              {"seed", c.seed},
              {"max_rejection_tries", c.max_rejection_tries},
              {"strict_comparator", c.strict_comparator},
              {"divisibility", divisibility_name(c.divisibility)}};
    if (c.procedure == Procedure::total_effect) j["k"] = c.k;
    return j;
}

json to_json(const TestResult& r) {
    json reps = json::array();
    for (double x : r.t_reps) reps.push_back(number_or_null(x));
    return {{"schema_version", kSchemaVersion},
            {"t_obs", number_or_null(r.t_obs)},
            {"p_value", r.p_value},
            {"reject", r.reject},
            {"exceed_count", r.exceed_count},
            {"config", to_json(r.config)},
            {"event", to_json(r.event)},
            {"warnings", r.warnings},
            {"t_reps", reps}};
}

json to_json(const SimConfig& c) {
    json procs = json::array(), methods = json::array();
    for (Procedure p : c.procedures) procs.push_back(to_string(p));
    for (SimMethod m : c.methods) methods.push_back(to_string(m));
    return {{"regime", c.regime}, {"n", c.n},           {"mu0", c.mu0},
            {"muB", c.muB},       {"muS", c.muS},       {"mu1", c.mu1},
            {"sigma0", c.sigma0}, {"sigmaB", c.sigmaB}, {"sigmaS", c.sigmaS},
            {"sigma1", c.sigma1}, {"reps", c.reps},     {"L", c.replicates},
            {"alpha", c.alpha},   {"k", c.k},           {"procedures", procs},
            {"methods", methods}, {"sidedness", to_string(c.sidedness)}, {"seed", c.seed}};
}

json to_json(const SimReport& report, bool include_timing) {
    json rows = json::array();
    for (const SimRow& r : report.rows)
        rows.push_back({{"regime", r.regime},
                        {"procedure", to_string(r.procedure)},
                        {"method", to_string(r.method)},
                        {"n", r.n},
                        {"k", r.k},
                        {"reps", r.reps},
                        {"completed", r.completed},
                        {"failures", r.failures},
                        {"rejections", r.rejections},
                        {"rate", r.rate},
                        {"mc_se", r.mc_se}});
    json j = {{"schema_version", kSchemaVersion}, {"rows", rows}, {"failure_messages", report.failure_messages}};
    if (include_timing) j["runtime_seconds"] = report.runtime_seconds;
    return j;
}

SimConfig sim_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
    static const std::set<std::string> known{"regime", "n",      "mu0",    "muB",    "muS",    "mu1",
                                             "sigma0", "sigmaB", "sigmaS", "sigma1", "reps",   "L",
                                             "alpha",  "k",      "procedures", "methods", "sidedness", "seed",
                                             "threads"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown simulation config key '" + key + "'");

    try {
        const std::size_t n = count_value(j, "n", 10);
        SimConfig c;
        const std::string regime = j.value("regime", std::string("custom"));
        if (regime == "sharp_null") c = sharp_null_config(n);
        else if (regime == "alternative") c = alternative_config(n);
        else if (regime == "weak_null") c = weak_null_config(n);
        else if (regime == "weak_alternative") c = weak_alternative_config(n);
        c.regime = regime;
        c.n = n;
        c.mu0 = j.value("mu0", c.mu0);
        c.muB = j.value("muB", c.muB);
        c.muS = j.value("muS", c.muS);
        c.mu1 = j.value("mu1", c.mu1);
        c.sigma0 = j.value("sigma0", c.sigma0);
        c.sigmaB = j.value("sigmaB", c.sigmaB);
        c.sigmaS = j.value("sigmaS", c.sigmaS);
        c.sigma1 = j.value("sigma1", c.sigma1);
        c.reps = j.value("reps", c.reps);
        c.replicates = j.value("L", c.replicates);
        c.alpha = j.value("alpha", c.alpha);
        c.k = count_value(j, "k", c.k);
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
        if (j.contains("sidedness")) c.sidedness = parse_sidedness(j.at("sidedness").get<std::string>());
        if (j.contains("procedures")) {
            c.procedures.clear();
            for (const auto& p : j.at("procedures")) c.procedures.push_back(parse_procedure(p.get<std::string>()));
        }
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid simulation config: ") + e.what());
    }
}

}  // namespace twosided
