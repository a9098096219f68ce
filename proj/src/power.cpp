#include "twosided/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twosided/combinatorics.hpp"
#include "twosided/csv.hpp"
#include "twosided/error.hpp"

namespace twosided {

void validate(const PowerParams& p) {
    if (p.n < 1) throw ParameterError("n must be at least 1");
    if (!(p.A > 0.0) || !std::isfinite(p.A)) throw ParameterError("A must be positive");
    if (!(p.a > 0.0) || !std::isfinite(p.a)) throw ParameterError("a must be positive");
    if (!std::isfinite(p.tau)) throw ParameterError("tau must be finite");
    if (!(p.c_order > 0.0) || !std::isfinite(p.c_order)) throw ParameterError("c must be positive");
    if (!(p.delta >= 0.0) || !std::isfinite(p.delta)) throw ParameterError("delta must be non-negative");
    if (!(p.eps >= 0.0) || !std::isfinite(p.eps)) throw ParameterError("eps must be non-negative");
}

std::vector<std::size_t> divisors(std::size_t n) {
    std::vector<std::size_t> small, large;
    for (std::size_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

std::size_t nearest_divisor(std::size_t n, std::size_t k) {
    if (n == 0) throw ParameterError("n must be at least 1");
    std::size_t best = 1;
    std::size_t best_gap = std::numeric_limits<std::size_t>::max();
    for (std::size_t d : divisors(n)) {
        const std::size_t gap = d > k ? d - k : k - d;
        if (gap < best_gap) {
            best = d;
            best_gap = gap;
        }
    }
    return best;
}

namespace {

std::size_t checked_k(const PowerParams& p, std::size_t k) {
    validate(p);
    if (k < 1 || k > p.n)
        throw ParameterError("block size k=" + std::to_string(k) + " must lie in [1, " + std::to_string(p.n) + "]");
    return p.n % k == 0 ? k : nearest_divisor(p.n, k);
}

double sigmoid_term(const PowerParams& p, std::size_t k) {
    const std::size_t m = p.n / k;
    if (p.tau == 0.0) return 1.0 / (1.0 + p.A);
    // a * tau * sqrt(C(2m, m)) assembled in log space so huge supports
    // saturate instead of overflowing.
    const double log_mag = std::log(p.a) + std::log(std::fabs(p.tau)) + 0.5 * log_choose(2 * m, m);
    double x;
    if (log_mag > 700.0)
        x = std::copysign(std::numeric_limits<double>::infinity(), p.tau);
    else
        x = std::copysign(std::exp(log_mag), p.tau);
    const double e = std::log(p.A) - x;
    if (e > 700.0) return 0.0;
    return 1.0 / (1.0 + std::exp(e));
}

}  // namespace

double power_support_term(const PowerParams& params, std::size_t k) {
    return sigmoid_term(params, checked_k(params, k));
}

double power_lower_bound(const PowerParams& params, std::size_t k) {
    k = checked_k(params, k);
    const double sample = 2.0 * static_cast<double>(params.n) * static_cast<double>(k);
    const double value =
        sigmoid_term(params, k) - params.c_order * std::pow(sample, -0.5 + params.delta) - params.eps;
    return std::clamp(value, 0.0, 1.0);
}

std::size_t recommend_k(std::size_t n, double beta) {
    if (n < 1) throw ParameterError("n must be at least 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
    const double target = 1.0 / (2.0 * static_cast<double>(n) * (1.0 - beta) * (1.0 - beta));
    std::size_t k = n;
    if (std::isfinite(target) && target < static_cast<double>(n))
        k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(target)));
    return nearest_divisor(n, std::min(k, n));
}

PowerCurve emit_power_curve(const PowerParams& params, const std::vector<std::size_t>& k_values) {
    validate(params);
    PowerCurve curve;
    curve.rows.reserve(k_values.size());
    for (std::size_t requested : k_values) {
        const std::size_t k = checked_k(params, requested);
        if (k != requested)
            curve.warnings.push_back("k=" + std::to_string(requested) + " does not divide n=" +
                                     std::to_string(params.n) + "; using k=" + std::to_string(k));
        const std::size_t m = params.n / k;
        curve.rows.push_back({k, log_choose(2 * m, m), 2 * params.n * k, power_lower_bound(params, k)});
    }
    return curve;
}

std::string power_curve_csv(const PowerCurve& curve) {
    std::ostringstream out;
    out << "k,log_support,sample_size,bound\n";
    for (const auto& r : curve.rows)
        out << r.k << ',' << csv::format_double(r.log_support) << ',' << r.sample_size << ','
            << csv::format_double(r.bound) << '\n';
    return out.str();
}

}  // namespace twosided
