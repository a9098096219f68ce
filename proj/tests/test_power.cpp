#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "twosided/error.hpp"
#include "twosided/power.hpp"

using namespace twosided;

namespace {

PowerParams figure3() {
    PowerParams p;
    p.n = 400;
    p.A = 1.0;
    p.a = 0.01;
    p.tau = 0.01;
    return p;
}

}  // namespace

TEST_CASE("zero effect leaves the constant sigmoid term") {
    PowerParams p;
    p.n = 50;
    p.A = 1.0;
    p.a = 0.3;
    p.tau = 0.0;
    p.eps = 0.01;
    for (std::size_t k : {1, 2, 5, 10, 25, 50}) {
        const double expected = 0.5 - 1.0 / std::sqrt(2.0 * 50 * k) - 0.01;
        CHECK(power_lower_bound(p, k) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("k = n evaluates the two-arrangement support directly") {
    PowerParams p;
    p.n = 30;
    p.A = 2.0;
    p.a = 1.5;
    p.tau = 0.8;
    p.c_order = 0.5;
    p.delta = 0.1;
    const double expected =
        1.0 / (1.0 + 2.0 * std::exp(-1.5 * 0.8 * std::sqrt(2.0))) - 0.5 * std::pow(2.0 * 30 * 30, -0.4);
    CHECK(power_lower_bound(p, 30) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(power_support_term(p, 30) ==
          doctest::Approx(1.0 / (1.0 + 2.0 * std::exp(-1.5 * 0.8 * std::sqrt(2.0)))).epsilon(1e-13));
}

TEST_CASE("figure preset has an interior maximum") {
    const PowerParams p = figure3();
    const auto ks = divisors(400);
    const PowerCurve curve = emit_power_curve(p, ks);
    REQUIRE(curve.rows.size() == ks.size());
    const auto best = std::max_element(curve.rows.begin(), curve.rows.end(),
                                       [](const auto& a, const auto& b) { return a.bound < b.bound; });
    CHECK(best != curve.rows.begin());
    CHECK(best != curve.rows.end() - 1);
    CHECK(best->bound > curve.rows.front().bound);
    CHECK(best->bound > curve.rows.back().bound);
    for (const auto& row : curve.rows) {
        CHECK(row.bound >= 0.0);
        CHECK(row.bound <= 1.0);
        CHECK(row.sample_size == 2 * 400 * row.k);
    }
}

TEST_CASE("monotonicity of the bound's components") {
    PowerParams p = figure3();
    const auto ks = divisors(p.n);
    for (std::size_t i = 1; i < ks.size(); ++i) {
        CHECK(power_support_term(p, ks[i]) <= power_support_term(p, ks[i - 1]));
        CHECK(std::pow(2.0 * p.n * ks[i], -0.5) <= std::pow(2.0 * p.n * ks[i - 1], -0.5));
    }
    for (std::size_t k : {8, 20, 40, 100}) {
        PowerParams lo = p, hi = p;
        hi.tau = 0.02;
        CHECK(power_lower_bound(hi, k) >= power_lower_bound(lo, k));
        hi = p;
        hi.A = 3.0;
        CHECK(power_lower_bound(hi, k) <= power_lower_bound(lo, k));
    }
}

TEST_CASE("block-size heuristic") {
    CHECK(recommend_k(100, 0.95) == 2);
    CHECK(recommend_k(100, 0.999999) == 100);
    const double beta = 1.0 - 1.0 / std::sqrt(12.0 * 1.4);
    CHECK(recommend_k(6, beta) == 1);
    CHECK(recommend_k(12, 0.5) == 1);
    CHECK_THROWS_AS(recommend_k(10, 1.0), ParameterError);
    CHECK_THROWS_AS(recommend_k(10, 0.0), ParameterError);
}

TEST_CASE("divisor snapping") {
    CHECK(nearest_divisor(12, 5) == 4);
    CHECK(nearest_divisor(12, 7) == 6);
    CHECK(nearest_divisor(12, 12) == 12);
    CHECK(nearest_divisor(10, 3) == 2);
    CHECK(divisors(12) == std::vector<std::size_t>{1, 2, 3, 4, 6, 12});

    PowerParams p = figure3();
    CHECK(power_lower_bound(p, 7) == power_lower_bound(p, 8));
    CHECK_THROWS_AS(power_lower_bound(p, 0), ParameterError);
    CHECK_THROWS_AS(power_lower_bound(p, 401), ParameterError);
    const PowerCurve c = emit_power_curve(p, {7});
    CHECK(c.rows.at(0).k == 8);
    CHECK(c.warnings.size() == 1);
}

TEST_CASE("curve bookkeeping") {
    PowerParams p;
    p.n = 24;
    p.tau = 0.1;
    const PowerCurve c = emit_power_curve(p, {4});
    CHECK(c.rows.at(0).log_support == doctest::Approx(std::log(924.0)).epsilon(1e-13));
    CHECK(c.rows.at(0).sample_size == 192);
    CHECK(emit_power_curve(p, {}).rows.empty());
    CHECK(power_curve_csv(emit_power_curve(p, {})) == "k,log_support,sample_size,bound\n");
}

TEST_CASE("huge supports do not overflow") {
    PowerParams p;
    p.n = 20000;
    p.A = 1.0;
    p.a = 0.5;
    p.tau = 1.0;
    const double b = power_lower_bound(p, 1);
    CHECK(std::isfinite(b));
    CHECK(b == doctest::Approx(1.0 - 1.0 / std::sqrt(40000.0)).epsilon(1e-12));
    p.tau = -1.0;
    CHECK(power_lower_bound(p, 1) == 0.0);
}

TEST_CASE("parameter validation") {
    PowerParams p;
    p.A = 0.0;
    CHECK_THROWS_AS(power_lower_bound(p, 1), ParameterError);
    p.A = 1.0;
    p.n = 0;
    CHECK_THROWS_AS(power_lower_bound(p, 1), ParameterError);
}
