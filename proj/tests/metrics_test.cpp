#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wheelhouse/error.hpp"
#include "wheelhouse/metrics.hpp"
#include "wheelhouse/rng.hpp"
#include "test_oracles.hpp"

using namespace wheelhouse;
using namespace wheelhouse::metrics;
using wheelhouse::test_support::Naive;

namespace {

ReturnSeries series(std::vector<double> r, Periodicity p = Periodicity::daily) {
    ReturnSeries s;
    s.periodicity = p;
    s.returns = Eigen::Map<Eigen::ArrayXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    return s;
}

}  // namespace

TEST(Metrics, DrawdownHandCase) {
    const std::vector<double> curve{100, 120, 90, 110};
    EXPECT_DOUBLE_EQ(max_drawdown(curve), -0.25);
    EquityCurve ec{{}, Eigen::Array4d(100, 120, 90, 110)};
    const auto m = compute_metrics(ec);
    EXPECT_NEAR(*m.max_drawdown, -0.25, 1e-15);
}

TEST(Metrics, MonotoneCurves) {
    EXPECT_EQ(max_drawdown(std::vector<double>{1, 2, 3, 4}), 0.0);
    EXPECT_DOUBLE_EQ(max_drawdown(std::vector<double>{10, 8, 5, 4}), 4.0 / 10.0 - 1.0);
}

TEST(Metrics, ConstantSeriesSharpeUndefined) {
    const auto s = series({0.01, 0.01, 0.01, 0.01});
    EXPECT_THROW(compute_metrics(s), UndefinedMetric);
    MetricsOptions lenient;
    lenient.allow_undefined = true;
    const auto m = compute_metrics(s, lenient);
    EXPECT_FALSE(m.sharpe.value.has_value());
    EXPECT_FALSE(m.calmar.value.has_value());
    EXPECT_EQ(*m.max_drawdown, 0.0);
}

TEST(Metrics, VarOnEquallySpacedReturns) {
    std::vector<double> r;
    for (int i = 0; i < 100; ++i) r.push_back(-0.05 + 0.001 * i);
    std::vector<double> shuffled = r;
    auto rng = make_rng(1);
    shuffle(std::span<double>(shuffled), rng);
    const auto m = compute_metrics(series(shuffled));
    EXPECT_DOUBLE_EQ(*m.var_95, r[4]);
    EXPECT_DOUBLE_EQ(*m.expected_shortfall, (r[0] + r[1] + r[2] + r[3] + r[4]) / 5.0);
}

TEST(Metrics, MatchesNaiveOracleOn20Series) {
    auto rng = make_rng(2026);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 30 + uniform_index(rng, 300);
        std::vector<double> r;
        for (std::uint64_t i = 0; i < n; ++i) r.push_back(0.0005 + 0.012 * standard_normal(rng));
        const auto p = trial % 2 ? Periodicity::monthly : Periodicity::daily;
        const Naive o{r, trial % 2 ? 12.0 : 252.0};
        const auto m = compute_metrics(series(r, p));
        EXPECT_NEAR(*m.total_return, o.total(), 1e-9);
        EXPECT_NEAR(*m.annualized_return, o.annualized(), 1e-9);
        EXPECT_NEAR(*m.annualized_volatility, o.sd() * std::sqrt(o.ppy), 1e-9);
        EXPECT_NEAR(*m.sharpe, o.sharpe(), 1e-9);
        EXPECT_NEAR(*m.sortino, o.sortino(), 1e-9);
        EXPECT_NEAR(*m.max_drawdown, o.mdd(), 1e-9);
        EXPECT_NEAR(*m.calmar, o.annualized() / std::abs(o.mdd()), 1e-9);
        EXPECT_NEAR(*m.average_drawdown, o.avg_dd(), 1e-9);
        EXPECT_NEAR(*m.var_95, o.var(), 1e-9);
        EXPECT_NEAR(*m.expected_shortfall, o.es(), 1e-9);
        EXPECT_NEAR(*m.win_rate, o.win(), 1e-9);
        EXPECT_LE(*m.expected_shortfall, *m.var_95);
    }
}

TEST(Metrics, RiskFreeRateShiftsSharpe) {
    const auto s = series({0.01, -0.02, 0.015, 0.003, -0.004});
    MetricsOptions o;
    o.risk_free_rate = 0.0252;
    const Naive n{{0.01 - 1e-4, -0.02 - 1e-4, 0.015 - 1e-4, 0.003 - 1e-4, -0.004 - 1e-4}, 252};
    EXPECT_NEAR(*compute_metrics(s, o).sharpe, n.sharpe(), 1e-12);
}

TEST(Metrics, SeriesChecks) {
    EXPECT_THROW(compute_metrics(series({0.1})), DomainError);
    EXPECT_THROW(compute_metrics(series({0.1, -1.0})), DomainError);
    auto s = series({0.1, 0.2});
    s.dates = {Date::parse("2021-01-05"), Date::parse("2021-01-05")};
    EXPECT_THROW(compute_metrics(s), DomainError);
}

TEST(Metrics, MonthlyReturnsUseMonthEnds) {
    EquityCurve c;
    c.dates = {Date::parse("2021-01-04"), Date::parse("2021-01-29"), Date::parse("2021-02-01"),
               Date::parse("2021-02-26"), Date::parse("2021-03-01")};
    c.values = Eigen::Array<double, 5, 1>(100, 110, 111, 99, 120);
    const auto m = monthly_returns(c);
    ASSERT_EQ(m.returns.size(), 3);
    EXPECT_NEAR(m.returns(0), 0.10, 1e-15);
    EXPECT_NEAR(m.returns(1), -0.10, 1e-15);
    EXPECT_NEAR(m.returns(2), 120.0 / 99.0 - 1.0, 1e-15);
    EXPECT_EQ(m.periodicity, Periodicity::monthly);
}

TEST(Bootstrap, ConstantSeriesZeroWidth) {
    const Eigen::ArrayXd x = Eigen::ArrayXd::Constant(50, 0.7);
    const auto ci = bootstrap_ci(x, [](const Eigen::ArrayXd& s) { return s.mean(); }, 1);
    EXPECT_DOUBLE_EQ(ci.low, 0.7);
    EXPECT_DOUBLE_EQ(ci.high, 0.7);
}

TEST(Bootstrap, CoinSeriesContainsMean) {
    auto rng = make_rng(9);
    Eigen::ArrayXd x(1000);
    for (auto& v : x) v = static_cast<double>(uniform_index(rng, 2));
    const auto ci = bootstrap_ci(x, [](const Eigen::ArrayXd& s) { return s.mean(); }, 3);
    EXPECT_LE(ci.low, x.mean());
    EXPECT_GE(ci.high, x.mean());
    EXPECT_LT(ci.high - ci.low, 0.1);
}

TEST(Bootstrap, DeterministicAcrossRunsAndJobs) {
    auto rng = make_rng(4);
    Eigen::ArrayXd x(200);
    for (auto& v : x) v = standard_normal(rng);
    const Statistic stat = [](const Eigen::ArrayXd& s) { return s.mean(); };
    const auto a = bootstrap_ci(x, stat, 77);
    const auto b = bootstrap_ci(x, stat, 77);
    const auto c = bootstrap_ci(x, stat, 77, 1000, 0.95, 4);
    EXPECT_EQ(a.low, b.low);
    EXPECT_EQ(a.high, b.high);
    EXPECT_EQ(a.low, c.low);
    EXPECT_EQ(a.high, c.high);
    EXPECT_NE(bootstrap_ci(x, stat, 78).low, a.low);
}

TEST(TTest, IdenticalSeriesNullCase) {
    const std::vector<double> a{0.01, -0.02, 0.03};
    const auto r = paired_t_test(a, a);
    EXPECT_EQ(r.t, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
}

TEST(TTest, HandComputedFixture) {
    // d = a - b = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10} * 0.001 - 0.004
    std::vector<double> a, b;
    for (int i = 1; i <= 10; ++i) {
        a.push_back(0.001 * i);
        b.push_back(0.004);
    }
    // mean d = 0.0015; sd d = 0.001 * sqrt(82.5 / 9); t = 0.0015 / (sd / sqrt(10))
    const double sd = 0.001 * std::sqrt(82.5 / 9.0);
    const double t = 0.0015 / (sd / std::sqrt(10.0));
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.mean_difference, 0.0015, 1e-15);
    EXPECT_NEAR(r.t, t, 1e-12);
    EXPECT_NEAR(t, 1.5666989036012804, 1e-12);
    EXPECT_EQ(r.degrees_of_freedom, 9);
    // scipy.stats.t.sf(1.5666989036012806, 9) * 2
    EXPECT_NEAR(r.p_value, 0.1516274745, 1e-9);
}

TEST(TTest, StrongSignalSmallP) {
    auto rng = make_rng(12);
    std::vector<double> a, b;
    for (int i = 0; i < 60; ++i) {
        b.push_back(0.002 * standard_normal(rng));
        a.push_back(b.back() + 0.01 + 1e-4 * standard_normal(rng));
    }
    EXPECT_LT(paired_t_test(a, b).p_value, 1e-3);
}

TEST(TTest, DegenerateAndShapeErrors) {
    const std::vector<double> a{0.02, 0.03}, b{0.01, 0.02};
    EXPECT_THROW(paired_t_test(a, b), DegenerateTest);
    EXPECT_THROW(paired_t_test(std::vector<double>{0.1}, std::vector<double>{0.2}), DomainError);
    EXPECT_THROW(paired_t_test(a, std::vector<double>{0.1}), DomainError);
    auto x = series({0.1, 0.2});
    auto y = series({0.1, 0.3});
    x.dates = {Date::parse("2021-01-04"), Date::parse("2021-01-05")};
    y.dates = {Date::parse("2021-01-04"), Date::parse("2021-01-06")};
    EXPECT_THROW(paired_t_test(x, y), DomainError);
}

TEST(Crra, ConstantSeriesEqualsConstant) {
    const std::vector<double> r(12, 0.013);
    for (double g : {0.5, 1.0, 2.0, 3.0, 4.0}) EXPECT_NEAR(crra_certainty_equivalent(r, g), 0.013, 1e-14);
}

TEST(Crra, TwoPointHandValue) {
    // W = {1.1, 0.9}; mean(W^-1) = (1/1.1 + 1/0.9) / 2 = 1/0.99; CE = 0.99 - 1.
    EXPECT_NEAR(crra_certainty_equivalent(std::vector<double>{0.10, -0.10}, 2.0), -0.01, 1e-14);
}

TEST(Crra, MonotoneInGammaAndBelowMean) {
    auto rng = make_rng(8);
    std::vector<double> r;
    for (int i = 0; i < 100; ++i) r.push_back(0.01 + 0.05 * standard_normal(rng));
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
    double prev = INFINITY;
    for (double g : {0.5, 1.0, 2.0, 3.0, 4.0, 8.0}) {
        const double ce = crra_certainty_equivalent(r, g);
        EXPECT_LE(ce, prev);
        EXPECT_LT(ce, mean);
        prev = ce;
    }
    EXPECT_THROW(crra_certainty_equivalent(r, 0.0), DomainError);
    EXPECT_THROW(crra_certainty_equivalent(std::vector<double>{-1.0}, 2.0), DomainError);
}
