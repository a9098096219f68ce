#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace twosided {

/// Planning inputs for the total-effect power lower bound under a square
/// complete design with I = J = 2n and n treated per side.
///
/// The bound's O((2nk)^(-1/2 + delta)) term has no published constant;
/// `c_order` stands in for it, so results are qualitative planning aids.
struct PowerParams {
    std::size_t n = 1;
    double A = 1.0;
    double a = 1.0;
    double tau = 0.0;
    double c_order = 1.0;
    double delta = 0.0;
    double eps = 0.0;
};

void validate(const PowerParams& params);

/// Divisor of n closest to k; ties resolve to the smaller divisor.
std::size_t nearest_divisor(std::size_t n, std::size_t k);

/// clamp(1 / (1 + A exp(-a tau sqrt(C(2n/k, n/k)))) - c (2nk)^(-1/2 + delta) - eps, 0, 1).
/// A k that does not divide n is snapped with nearest_divisor(); k < 1 or
/// k > n throws ParameterError.
double power_lower_bound(const PowerParams& params, std::size_t k);

/// The sigmoid term alone (no clamping, no finite-sample penalty).
double power_support_term(const PowerParams& params, std::size_t k);

/// k ~ 1 / (2n (1 - beta)^2), rounded, clamped to [1, n], snapped to a divisor of n.
std::size_t recommend_k(std::size_t n, double beta);

struct PowerCurveRow {
    std::size_t k = 0;
    double log_support = 0.0;
    std::size_t sample_size = 0;  // 2nk
    double bound = 0.0;
};

struct PowerCurve {
    std::vector<PowerCurveRow> rows;
    std::vector<std::string> warnings;
};

PowerCurve emit_power_curve(const PowerParams& params, const std::vector<std::size_t>& k_values);

/// CSV with header row "k,log_support,sample_size,bound".
std::string power_curve_csv(const PowerCurve& curve);

/// All divisors of n, ascending.
std::vector<std::size_t> divisors(std::size_t n);

}  // namespace twosided
