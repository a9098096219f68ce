#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "twosided/engine.hpp"
#include "twosided/error.hpp"
#include "twosided/power.hpp"
#include "twosided/serialize.hpp"
#include "twosided/sim.hpp"

namespace py = pybind11;
namespace ts = twosided;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ts::OutcomeMatrix to_outcomes(const DoubleArray& y) {
    if (y.ndim() != 2) throw ts::ShapeError("outcomes must be a 2-D array");
    const auto rows = static_cast<std::size_t>(y.shape(0));
    const auto cols = static_cast<std::size_t>(y.shape(1));
    std::vector<double> data(y.data(), y.data() + rows * cols);
    return ts::OutcomeMatrix(ts::Matrix(rows, cols, std::move(data)));
}

ts::AssignmentVector to_assignment(const std::vector<int>& bits) {
    std::vector<std::uint8_t> v;
    v.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) throw ts::ParameterError("assignment entries must be 0 or 1");
        v.push_back(static_cast<std::uint8_t>(b));
    }
    return ts::AssignmentVector(std::move(v));
}

py::array_t<double> to_numpy(const ts::Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

std::string run_test_json(const DoubleArray& y, const std::vector<int>& buyer, const std::vector<int>& seller,
                          const std::string& procedure, const std::string& statistic, int L, double alpha,
                          std::size_t k, const std::string& sidedness, const std::string& resampler,
                          std::uint64_t seed, const std::string& design, double p_buyer, double p_seller,
                          bool strict_comparator, unsigned threads) {
    const ts::OutcomeMatrix outcomes = to_outcomes(y);
    const ts::AssignmentPair pair{to_assignment(buyer), to_assignment(seller)};
    ts::TestConfig c;
    c.procedure = ts::parse_procedure(procedure);
    c.statistic = ts::parse_statistic(statistic);
    c.replicates = L;
    c.alpha = alpha;
    c.k = k;
    c.sidedness = ts::parse_sidedness(sidedness);
    c.resampler = ts::parse_resampler(resampler);
    c.seed = seed;
    c.strict_comparator = strict_comparator;
    c.threads = threads;
    ts::validate(c);
    if (c.procedure == ts::Procedure::total_effect)
        ts::build_k_block_event(pair, k);
    else
        ts::build_spillover_event(pair, c.procedure == ts::Procedure::buyer_spillover ? ts::Side::buyer
                                                                                       : ts::Side::seller);
    ts::Design d = design == "bernoulli"
                       ? ts::Design::bernoulli(pair.rows(), pair.cols(), p_buyer, p_seller)
                       : ts::Design::complete(pair.rows(), pair.buyer.treated_count(), pair.cols(),
                                              pair.seller.treated_count());
    if (design != "bernoulli" && design != "complete")
        throw ts::ParameterError("design must be 'complete' or 'bernoulli'");
    py::gil_scoped_release release;
    return ts::to_json(ts::run_test(outcomes, pair, d, c)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Randomization tests for two-sided marketplace experiments";

    auto base = py::register_exception<ts::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ts::ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<ts::ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<ts::ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ts::ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ts::DegenerateEventError>(m, "DegenerateEventError", base.ptr());
    py::register_exception<ts::DegenerateArmError>(m, "DegenerateArmError", base.ptr());
    py::register_exception<ts::VarianceUndefinedError>(m, "VarianceUndefinedError", base.ptr());
    py::register_exception<ts::ZeroVarianceError>(m, "ZeroVarianceError", base.ptr());
    py::register_exception<ts::SamplerExhaustedError>(m, "SamplerExhaustedError", base.ptr());

    m.def("_run_test_json", &run_test_json, py::arg("y"), py::arg("buyer"), py::arg("seller"),
          py::arg("procedure"), py::arg("statistic"), py::arg("L"), py::arg("alpha"), py::arg("k"),
          py::arg("sidedness"), py::arg("resampler"), py::arg("seed"), py::arg("design"), py::arg("p_buyer"),
          py::arg("p_seller"), py::arg("strict_comparator"), py::arg("threads"));

    m.def(
        "sample_complete_design",
        [](std::size_t I, std::size_t I1, std::size_t J, std::size_t J1, std::uint64_t seed) {
            const auto p = ts::sample_design(ts::Design::complete(I, I1, J, J1), seed);
            return py::make_tuple(std::vector<int>(p.buyer.bits().begin(), p.buyer.bits().end()),
                                  std::vector<int>(p.seller.bits().begin(), p.seller.bits().end()));
        },
        py::arg("I"), py::arg("I1"), py::arg("J"), py::arg("J1"), py::arg("seed") = 0);

    m.def(
        "support_size_log",
        [](const std::vector<int>& buyer, const std::vector<int>& seller, const std::string& procedure,
           std::size_t k) {
            const ts::AssignmentPair pair{to_assignment(buyer), to_assignment(seller)};
            const auto proc = ts::parse_procedure(procedure);
            if (proc == ts::Procedure::total_effect) return ts::support_size_log(ts::build_k_block_event(pair, k));
            return ts::support_size_log(ts::build_spillover_event(
                pair, proc == ts::Procedure::buyer_spillover ? ts::Side::buyer : ts::Side::seller));
        },
        py::arg("buyer"), py::arg("seller"), py::arg("procedure") = "total_effect", py::arg("k") = 1);

    m.def(
        "power_lower_bound",
        [](std::size_t n, std::size_t k, double A, double a, double tau, double c, double delta, double eps) {
            return ts::power_lower_bound(ts::PowerParams{n, A, a, tau, c, delta, eps}, k);
        },
        py::arg("n"), py::arg("k"), py::arg("A"), py::arg("a"), py::arg("tau"), py::arg("c") = 1.0,
        py::arg("delta") = 0.0, py::arg("eps") = 0.0);

    m.def("recommend_k", &ts::recommend_k, py::arg("n"), py::arg("beta"));

    m.def(
        "power_curve",
        [](std::size_t n, const std::vector<std::size_t>& ks, double A, double a, double tau, double c, double delta,
           double eps) {
            const auto curve = ts::emit_power_curve(ts::PowerParams{n, A, a, tau, c, delta, eps}, ks);
            py::list rows;
            for (const auto& r : curve.rows) {
                py::dict d;
                d["k"] = r.k;
                d["log_support"] = r.log_support;
                d["sample_size"] = r.sample_size;
                d["bound"] = r.bound;
                rows.append(d);
            }
            return rows;
        },
        py::arg("n"), py::arg("k_values"), py::arg("A"), py::arg("a"), py::arg("tau"), py::arg("c") = 1.0,
        py::arg("delta") = 0.0, py::arg("eps") = 0.0);

    m.def(
        "generate_schedule",
        [](const std::string& config_json, std::uint64_t seed) {
            const auto c = ts::sim_config_from_json(nlohmann::json::parse(config_json));
            ts::validate(c);
            const auto s = ts::generate_schedule(c, seed);
            return py::make_tuple(to_numpy(s.y00()), to_numpy(s.y10()), to_numpy(s.y01()), to_numpy(s.y11()));
        },
        py::arg("config_json"), py::arg("seed"));

    m.def(
        "_run_simulation_json",
        [](const std::string& config_json) {
            const auto c = ts::sim_config_from_json(nlohmann::json::parse(config_json));
            py::gil_scoped_release release;
            return ts::to_json(ts::run_simulation(c)).dump();
        },
        py::arg("config_json"));
}
