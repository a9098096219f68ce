#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "twosided/error.hpp"
#include "twosided/sim.hpp"

using namespace twosided;

TEST_CASE("sharp-null schedule satisfies every sharp null exactly") {
    const auto s = generate_schedule(sharp_null_config(10), 3);
    CHECK(s.rows() == 30);
    CHECK(s.y10() == s.y00());
    CHECK(s.y01() == s.y00());
    CHECK(s.y11() == s.y00());
}

TEST_CASE("weak-null schedule moments") {
    const SimConfig c = weak_null_config(334);
    const auto s = generate_schedule(c, 8);
    const auto d = s.y10().data();
    const auto b = s.y00().data();
    long double sum = 0, sum2 = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const long double x = d[i] - b[i];
        sum += x;
        sum2 += x * x;
    }
    const double n = static_cast<double>(d.size());
    REQUIRE(n >= 1e6);
    const double mean = static_cast<double>(sum / n);
    const double sd = std::sqrt(static_cast<double>(sum2 / n) - mean * mean);
    CHECK(std::fabs(mean) < 0.002);
    CHECK(std::fabs(sd - 0.4) < 0.01);
    CHECK(s.y01() == s.y00());
}

TEST_CASE("alternative schedule shifts") {
    const auto s = generate_schedule(alternative_config(20), 1);
    for (std::size_t i = 0; i < s.y00().data().size(); ++i) {
        REQUIRE(s.y10().data()[i] - s.y00().data()[i] == doctest::Approx(0.01).epsilon(1e-9));
        REQUIRE(s.y11().data()[i] - s.y00().data()[i] == doctest::Approx(0.02).epsilon(1e-9));
    }
}

TEST_CASE("neymanian comparator") {
    // Arms with equal means and positive spread: statistic exactly zero.
    const AssignmentPair pair{AssignmentVector{1, 1, 0, 0}, AssignmentVector{0, 0}};
    const OutcomeMatrix y(Matrix(4, 2, {1, 1, 3, 3, 1, 1, 3, 3}));
    const auto e = build_spillover_event(pair, Side::buyer);
    for (double a : {0.01, 0.05, 0.2, 0.49}) {
        CHECK_FALSE(neymanian_test(y, pair, e, a));
        CHECK_FALSE(neymanian_test(y, pair, e, a, Sidedness::two_sided));
    }
    const OutcomeMatrix big(Matrix(4, 2, {10, 10, 11, 11, 1, 1, 0, 0}));
    CHECK(neymanian_test(big, pair, e, 0.05));
    const OutcomeMatrix neg(Matrix(4, 2, {1, 1, 0, 0, 10, 10, 11, 11}));
    CHECK_FALSE(neymanian_test(neg, pair, e, 0.05));
    CHECK(neymanian_test(neg, pair, e, 0.05, Sidedness::two_sided));
}

TEST_CASE("simulation report bookkeeping and thread invariance") {
    SimConfig c = alternative_config(6);
    c.reps = 40;
    c.replicates = 60;
    c.seed = 5;
    c.threads = 1;
    const SimReport r1 = run_simulation(c);
    c.threads = 3;
    const SimReport r3 = run_simulation(c);
    REQUIRE(r1.rows.size() == 6);
    for (std::size_t i = 0; i < r1.rows.size(); ++i) {
        const SimRow& a = r1.rows[i];
        CHECK(a.rejections == r3.rows[i].rejections);
        CHECK(a.completed + a.failures == a.reps);
        CHECK(a.rate >= 0.0);
        CHECK(a.rate <= 1.0);
        if (a.completed > 0) {
            CHECK(a.rate == doctest::Approx(double(a.rejections) / a.completed));
            CHECK(a.mc_se == doctest::Approx(std::sqrt(a.rate * (1 - a.rate) / a.completed)));
        }
    }
    CHECK(sim_report_csv(r1) == sim_report_csv(r3));
}

TEST_CASE("failures are counted, not dropped") {
    // k = n leaves a single treated block, so studentization is undefined
    // in every replication.
    SimConfig c = sharp_null_config(4);
    c.reps = 5;
    c.replicates = 20;
    c.procedures = {Procedure::total_effect};
    c.k = 4;
    c.methods = {SimMethod::frt_adjusted};
    const SimReport r = run_simulation(c);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].failures == 5);
    CHECK(r.rows[0].completed == 0);
    CHECK_FALSE(r.failure_messages.empty());
}

TEST_CASE("config validation") {
    SimConfig c = sharp_null_config(1);
    CHECK_THROWS_AS(run_simulation(c), ParameterError);
    c = sharp_null_config(5);
    c.reps = 0;
    CHECK_THROWS_AS(run_simulation(c), ParameterError);
    c = sharp_null_config(5);
    c.sigmaB = -1;
    CHECK_THROWS_AS(run_simulation(c), ParameterError);
    c = sharp_null_config(5);
    c.k = 6;
    CHECK_THROWS_AS(run_simulation(c), ParameterError);
}

TEST_CASE("table presets") {
    const auto t1 = table_preset(1, {}, {}, 100, 50, 1);
    CHECK(t1.size() == 12);
    for (const auto& c : t1) {
        CHECK(c.k == std::max<std::size_t>(1, c.n / 4));
        CHECK(c.reps == 100);
        CHECK(c.replicates == 50);
        CHECK(c.sidedness == Sidedness::two_sided);
    }
    const auto t2 = table_preset(2, {}, {}, 10, 10, 1);
    CHECK(t2.size() == 16);
    for (const auto& c : t2) {
        CHECK(c.n == 100);
        CHECK(c.procedures == std::vector<Procedure>{Procedure::total_effect});
    }
    const auto t3 = table_preset(3, {50}, {}, 10, 10, 1);
    REQUIRE(t3.size() == 2);
    CHECK(t3[0].regime == "weak_null");
    CHECK(t3[0].sigmaB == 0.4);
    CHECK(t3[0].sigma1 == 0.4);
    CHECK(t3[0].sigmaS == 0.0);
    CHECK(t3[0].k == 2);
    const auto t4 = table_preset(4, {}, {1, 50}, 10, 10, 1);
    CHECK(t4.size() == 4);
    CHECK_THROWS_AS(table_preset(5, {}, {}, 10, 10, 1), ParameterError);
    CHECK(parse_method("neymanian") == SimMethod::neymanian);
}
