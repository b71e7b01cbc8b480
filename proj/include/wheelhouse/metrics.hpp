#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wheelhouse/date.hpp"

namespace wheelhouse::metrics {

enum class Periodicity { daily, monthly };
int periods_per_year(Periodicity periodicity);  // 252 or 12

struct ReturnSeries {
    Periodicity periodicity = Periodicity::daily;
    std::vector<Date> dates;
    Eigen::ArrayXd returns;  // simple returns, each > -1
};

// Throws DomainError: size mismatch, non-increasing dates, return <= -1.
void check_series(const ReturnSeries& series);

struct EquityCurve {
    std::vector<Date> dates;
    Eigen::ArrayXd values;
};

ReturnSeries to_returns(const EquityCurve& curve, Periodicity periodicity = Periodicity::daily);
// Month-end values (the last point of each calendar month), first point kept
// as the base.
ReturnSeries monthly_returns(const EquityCurve& curve);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

struct MetricValue {
    std::optional<double> value;  // empty only when undefined values are allowed
    std::optional<Interval> ci;

    double operator*() const { return value.value(); }
};

struct MetricsReport {
    MetricValue total_return;
    MetricValue annualized_return;
    MetricValue annualized_volatility;
    MetricValue sharpe;
    MetricValue sortino;
    MetricValue calmar;
    MetricValue max_drawdown;
    MetricValue average_drawdown;
    MetricValue var_95;
    MetricValue expected_shortfall;
    MetricValue win_rate;
    std::size_t periods = 0;
};

struct MetricsOptions {
    double risk_free_rate = 0.0;  // annual, applied per period as rf / periods_per_year
    // When false, an undefined Sharpe/Sortino/Calmar throws UndefinedMetric.
    bool allow_undefined = false;
};

// Annualized return is geometric. Sharpe and Sortino use the mean excess
// return over the sample standard deviation (n - 1) and the downside
// deviation against 0 (over all n) respectively, scaled by sqrt(periods per
// year). VaR is the empirical 5% quantile with lower interpolation, index
// floor(0.05 (n - 1)) of the sorted returns; expected shortfall averages the
// returns at or below it. Average drawdown is the mean depth of the distinct
// drawdown episodes (0 when there are none).
MetricsReport compute_metrics(const ReturnSeries& series, const MetricsOptions& options = {});
MetricsReport compute_metrics(const EquityCurve& curve, Periodicity periodicity = Periodicity::daily,
                              const MetricsOptions& options = {});

// min over t of value_t / running_peak_t - 1; always <= 0.
double max_drawdown(std::span<const double> curve);
Eigen::ArrayXd curve_from_returns(const Eigen::ArrayXd& returns, double start = 1.0);

using Statistic = std::function<double(const Eigen::ArrayXd&)>;

// Percentile bootstrap: i.i.d. resamples with replacement; iteration i draws
// from its own stream (seed, i), so the result does not depend on `jobs`.
// Interval ends are linearly interpolated quantiles of the replicates.
Interval bootstrap_ci(const Eigen::ArrayXd& series, const Statistic& statistic, std::uint64_t seed,
                      int iterations = 1000, double level = 0.95, int jobs = 1);

struct TTestResult {
    double mean_difference = 0.0;
    double t = 0.0;
    double p_value = 1.0;
    int degrees_of_freedom = 0;
};

// Two-sided paired t on a - b. Identical series give t = 0, p = 1; constant
// non-zero differences throw DegenerateTest.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);
// Also requires identical dates.
TTestResult paired_t_test(const ReturnSeries& a, const ReturnSeries& b);

// U(W) = W^(1 - gamma) / (1 - gamma) over wealth relatives W = 1 + r, log
// utility at gamma = 1. Returns U^-1(mean U) - 1. Throws DomainError for
// gamma <= 0 or any return <= -1.
double crra_certainty_equivalent(std::span<const double> returns, double gamma);

}  // namespace wheelhouse::metrics
