#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aequity/rng.hpp"
#include "aequity/stats.hpp"
#include "oracles.hpp"

using namespace aequity;

TEST_CASE("welch: identical samples give t = 0, p = 1") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const TTestResult r = welch_t_test(xs, xs);
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("welch: p for t = 2, df = 10 is about 0.0734") {
    // survival value from the t distribution; quadrature oracle cross-check
    const double p = 2.0 * student_t_sf(2.0, 10.0);
    CHECK(p == doctest::Approx(0.0734).epsilon(0.015));
    CHECK(p == doctest::Approx(2.0 * oracle::t_sf_quadrature(2.0, 10.0)).epsilon(1e-8));
}

TEST_CASE("welch: swapping samples negates t and preserves p") {
    const std::vector<double> xs{1.0, 2.5, 3.0, 5.0, 4.0};
    const std::vector<double> ys{2.0, 2.2, 6.0, 3.5};
    const TTestResult a = welch_t_test(xs, ys);
    const TTestResult b = welch_t_test(ys, xs);
    CHECK(a.t == doctest::Approx(-b.t));
    CHECK(a.p == doctest::Approx(b.p));
    CHECK(a.df == doctest::Approx(b.df));
}

TEST_CASE("welch: zero-variance handling") {
    const std::vector<double> a{5.0, 5.0, 5.0};
    const std::vector<double> b{7.0, 7.0, 7.0};
    const TTestResult same = welch_t_test(a, a);
    CHECK(same.degenerate);
    CHECK(same.p == doctest::Approx(1.0));
    const TTestResult diff = welch_t_test(a, b);
    CHECK(diff.degenerate);
    CHECK(diff.p == doctest::Approx(0.0));
}

TEST_CASE("welch t and ANOVA p values match the quadrature oracles to 1e-3") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t nx = 4 + rng.below(20);
        const std::size_t ny = 4 + rng.below(20);
        std::vector<double> xs(nx), ys(ny);
        const double shift = rng.uniform(-1.0, 1.0);
        for (double& v : xs) v = rng.normal();
        for (double& v : ys) v = rng.normal() * rng.uniform(0.5, 2.0) + shift;
        const TTestResult r = welch_t_test(xs, ys);
        const double oracle_p = 2.0 * oracle::t_sf_quadrature(std::abs(r.t), r.df);
        CHECK(r.p == doctest::Approx(oracle_p).epsilon(1e-3));
        CHECK(r.p >= 0.0);
        CHECK(r.p <= 1.0);
    }
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> groups(2 + rng.below(3));
        for (auto& g : groups) {
            g.resize(4 + rng.below(12));
            const double shift = rng.uniform(-1.0, 1.0);
            for (double& v : g) v = rng.normal() + shift;
        }
        const AnovaResult r = one_way_anova(groups);
        std::size_t n = 0;
        for (const auto& g : groups) n += g.size();
        const double oracle_p = oracle::f_sf_quadrature(
            r.f, static_cast<double>(groups.size() - 1), static_cast<double>(n - groups.size()));
        CHECK(r.p == doctest::Approx(oracle_p).epsilon(1e-3));
        CHECK(r.p >= 0.0);
        CHECK(r.p <= 1.0);
    }
}

TEST_CASE("anova: identical groups give F = 0, p = 1") {
    const std::vector<std::vector<double>> groups{{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}};
    const AnovaResult r = one_way_anova(groups);
    CHECK(r.f == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("anova: all-identical values are degenerate with p = 1") {
    const std::vector<std::vector<double>> groups{{2.0, 2.0}, {2.0, 2.0}, {2.0, 2.0}};
    const AnovaResult r = one_way_anova(groups);
    CHECK(r.degenerate);
    CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("anova: zero within-variance with unequal means flags p = 0") {
    const std::vector<std::vector<double>> groups{{1.0, 1.0}, {2.0, 2.0}};
    const AnovaResult r = one_way_anova(groups);
    CHECK(r.degenerate);
    CHECK(r.p == doctest::Approx(0.0));
}

TEST_CASE("anova separates planted group gaps") {
    Rng rng(7);
    std::vector<std::vector<double>> groups(3);
    const double shifts[3] = {0.0, 1.0, 2.0};
    for (int g = 0; g < 3; ++g) {
        groups[g].resize(20);
        for (double& v : groups[g]) v = rng.normal() * 0.5 + shifts[g];
    }
    const AnovaResult r = one_way_anova(groups);
    CHECK(r.p < 0.05);
}

TEST_CASE("percentile_ci: constant samples collapse to the value") {
    const std::vector<double> xs{4.0, 4.0, 4.0, 4.0};
    const auto [lo, hi] = percentile_ci(xs);
    CHECK(lo == doctest::Approx(4.0));
    CHECK(hi == doctest::Approx(4.0));
}

TEST_CASE("percentile_ci: samples 1..100 give (3.475, 97.525) by rank arithmetic") {
    std::vector<double> xs(100);
    for (int i = 0; i < 100; ++i) xs[i] = static_cast<double>(i + 1);
    const auto [lo, hi] = percentile_ci(xs);
    // hand rank arithmetic: h = 0.025 * 99 = 2.475 -> 3 + 0.475; mirrored top
    CHECK(lo == doctest::Approx(3.475));
    CHECK(hi == doctest::Approx(97.525));
}

TEST_CASE("percentile_ci widens monotonically with spread") {
    Rng rng(5);
    std::vector<double> xs(200);
    for (double& v : xs) v = rng.normal();
    std::vector<double> wide = xs;
    for (double& v : wide) v *= 3.0;
    const auto a = percentile_ci(xs);
    const auto b = percentile_ci(wide);
    CHECK(b.second - b.first > a.second - a.first);
}

TEST_CASE("incomplete beta edge cases") {
    CHECK(reg_inc_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
    CHECK(reg_inc_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
    // I_x(1,1) = x
    CHECK(reg_inc_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37));
}
