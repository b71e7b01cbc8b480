#include "wheelhouse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "wheelhouse/error.hpp"
#include "wheelhouse/rng.hpp"

namespace wheelhouse::metrics {

namespace {

Eigen::Map<const Eigen::ArrayXd> as_array(std::span<const double> s) {
    return {s.data(), static_cast<Eigen::Index>(s.size())};
}

double sample_stdev(const Eigen::ArrayXd& x) {
    const double mean = x.mean();
    return std::sqrt((x - mean).square().sum() / static_cast<double>(x.size() - 1));
}

double average_drawdown(const Eigen::ArrayXd& curve) {
    double peak = curve(0);
    double depth = 0.0;
    double total = 0.0;
    int episodes = 0;
    for (Eigen::Index i = 1; i < curve.size(); ++i) {
        if (curve(i) >= peak) {
            if (depth < 0.0) {
                total += depth;
                ++episodes;
            }
            depth = 0.0;
            peak = curve(i);
        } else {
            depth = std::min(depth, curve(i) / peak - 1.0);
        }
    }
    if (depth < 0.0) {
        total += depth;
        ++episodes;
    }
    return episodes ? total / episodes : 0.0;
}

MetricValue undefined_or_throw(bool allow, const char* what) {
    if (!allow) throw UndefinedMetric(what);
    return {};
}

double quantile(std::vector<double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

int periods_per_year(Periodicity p) { return p == Periodicity::daily ? 252 : 12; }

void check_series(const ReturnSeries& s) {
    if (!s.dates.empty() && s.dates.size() != static_cast<std::size_t>(s.returns.size()))
        throw DomainError("return series: dates and returns differ in length");
    for (std::size_t i = 1; i < s.dates.size(); ++i)
        if (!(s.dates[i - 1] < s.dates[i])) throw DomainError("return series: dates must strictly increase");
    for (Eigen::Index i = 0; i < s.returns.size(); ++i)
        if (!(s.returns(i) > -1.0) || !std::isfinite(s.returns(i)))
            throw DomainError("return series: returns must be finite and > -1");
}

Eigen::ArrayXd curve_from_returns(const Eigen::ArrayXd& returns, double start) {
    Eigen::ArrayXd curve(returns.size() + 1);
    curve(0) = start;
    for (Eigen::Index i = 0; i < returns.size(); ++i) curve(i + 1) = curve(i) * (1.0 + returns(i));
    return curve;
}

ReturnSeries to_returns(const EquityCurve& curve, Periodicity periodicity) {
    if (curve.values.size() < 2) throw DomainError("equity curve needs at least two points");
    if ((curve.values <= 0.0).any()) throw DomainError("equity curve values must be positive");
    ReturnSeries s;
    s.periodicity = periodicity;
    const auto n = curve.values.size() - 1;
    s.returns = curve.values.tail(n) / curve.values.head(n) - 1.0;
    if (!curve.dates.empty()) s.dates.assign(curve.dates.begin() + 1, curve.dates.end());
    return s;
}

ReturnSeries monthly_returns(const EquityCurve& curve) {
    if (curve.dates.size() != static_cast<std::size_t>(curve.values.size()))
        throw DomainError("monthly returns need a dated curve");
    EquityCurve month_end;
    std::vector<double> values;
    for (std::size_t i = 0; i < curve.dates.size(); ++i) {
        const bool last_of_month = i + 1 == curve.dates.size() || curve.dates[i + 1].month() != curve.dates[i].month() ||
                                   curve.dates[i + 1].year() != curve.dates[i].year();
        if (i == 0 || last_of_month) {
            month_end.dates.push_back(curve.dates[i]);
            values.push_back(curve.values(static_cast<Eigen::Index>(i)));
        }
    }
    month_end.values = Eigen::Map<Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return to_returns(month_end, Periodicity::monthly);
}

double max_drawdown(std::span<const double> curve) {
    double peak = -INFINITY;
    double worst = 0.0;
    for (double v : curve) {
        peak = std::max(peak, v);
        worst = std::min(worst, v / peak - 1.0);
    }
    return worst;
}

MetricsReport compute_metrics(const ReturnSeries& series, const MetricsOptions& options) {
    check_series(series);
    const auto& r = series.returns;
    const auto n = r.size();
    if (n < 2) throw DomainError("metrics need at least two returns");
    const double ppy = periods_per_year(series.periodicity);
    const double rf = options.risk_free_rate / ppy;

    MetricsReport m;
    m.periods = static_cast<std::size_t>(n);
    const Eigen::ArrayXd curve = curve_from_returns(r);
    const double growth = curve(n);
    m.total_return.value = growth - 1.0;
    m.annualized_return.value = std::pow(growth, ppy / static_cast<double>(n)) - 1.0;

    const double sd = sample_stdev(r);
    m.annualized_volatility.value = sd * std::sqrt(ppy);
    const double excess = (r - rf).mean();
    m.sharpe = sd > 0.0 ? MetricValue{excess / sd * std::sqrt(ppy), {}}
                        : undefined_or_throw(options.allow_undefined, "Sharpe ratio undefined: zero variance");
    const double downside = std::sqrt(r.min(0.0).square().sum() / static_cast<double>(n));
    m.sortino = downside > 0.0
                    ? MetricValue{excess / downside * std::sqrt(ppy), {}}
                    : undefined_or_throw(options.allow_undefined, "Sortino ratio undefined: no downside returns");

    const double mdd = max_drawdown({curve.data(), static_cast<std::size_t>(curve.size())});
    m.max_drawdown.value = mdd;
    m.average_drawdown.value = average_drawdown(curve);
    m.calmar = mdd < 0.0 ? MetricValue{*m.annualized_return / std::abs(mdd), {}}
                         : undefined_or_throw(options.allow_undefined, "Calmar ratio undefined: zero drawdown");

    std::vector<double> sorted(r.begin(), r.end());
    std::sort(sorted.begin(), sorted.end());
    const double var = sorted[static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(n - 1)))];
    m.var_95.value = var;
    double tail = 0.0;
    int count = 0;
    for (double x : sorted) {
        if (x > var) break;
        tail += x;
        ++count;
    }
    m.expected_shortfall.value = tail / count;
    m.win_rate.value = static_cast<double>((r > 0.0).count()) / static_cast<double>(n);
    return m;
}

MetricsReport compute_metrics(const EquityCurve& curve, Periodicity periodicity, const MetricsOptions& options) {
    return compute_metrics(to_returns(curve, periodicity), options);
}

Interval bootstrap_ci(const Eigen::ArrayXd& series, const Statistic& statistic, std::uint64_t seed, int iterations,
                      double level, int jobs) {
    if (series.size() == 0) throw DomainError("bootstrap needs a non-empty series");
    if (iterations < 1) throw DomainError("bootstrap needs at least one iteration");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
    std::vector<double> replicates(static_cast<std::size_t>(iterations));
    const auto n = static_cast<std::uint64_t>(series.size());
    auto run = [&](int first, int last) {
        Eigen::ArrayXd sample(series.size());
        for (int it = first; it < last; ++it) {
            auto rng = make_rng(seed, static_cast<std::uint64_t>(it));
            for (Eigen::Index k = 0; k < sample.size(); ++k)
                sample(k) = series(static_cast<Eigen::Index>(uniform_index(rng, n)));
            replicates[static_cast<std::size_t>(it)] = statistic(sample);
        }
    };
    jobs = std::clamp(jobs, 1, iterations);
    if (jobs == 1) {
        run(0, iterations);
    } else {
        std::vector<std::jthread> workers;
        for (int j = 0; j < jobs; ++j) workers.emplace_back(run, iterations * j / jobs, iterations * (j + 1) / jobs);
    }
    std::sort(replicates.begin(), replicates.end());
    const double alpha = 1.0 - level;
    return {quantile(replicates, alpha / 2.0), quantile(replicates, 1.0 - alpha / 2.0)};
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("paired t-test needs equal-length series");
    if (a.size() < 2) throw DomainError("paired t-test needs at least two pairs");
    const Eigen::ArrayXd d = as_array(a) - as_array(b);
    const auto n = static_cast<double>(d.size());
    TTestResult out;
    out.degrees_of_freedom = static_cast<int>(d.size()) - 1;
    out.mean_difference = d.mean();
    const double scale = d.abs().maxCoeff();
    if (scale == 0.0) return out;
    const double sd = sample_stdev(d);
    // Constant up to rounding.
    if (sd <= 1e-12 * scale) throw DegenerateTest("paired t-test undefined: differences are constant and non-zero");
    out.t = out.mean_difference / (sd / std::sqrt(n));
    const boost::math::students_t dist(out.degrees_of_freedom);
    out.p_value = 2.0 * boost::math::cdf(dist, -std::abs(out.t));
    return out;
}

TTestResult paired_t_test(const ReturnSeries& a, const ReturnSeries& b) {
    if (a.dates != b.dates) throw DomainError("paired t-test needs aligned dates");
    return paired_t_test(std::span<const double>(a.returns.data(), static_cast<std::size_t>(a.returns.size())),
                         std::span<const double>(b.returns.data(), static_cast<std::size_t>(b.returns.size())));
}

double crra_certainty_equivalent(std::span<const double> returns, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("CRRA gamma must be positive");
    if (returns.empty()) throw DomainError("certainty equivalent needs at least one return");
    const Eigen::ArrayXd w = as_array(returns) + 1.0;
    if ((w <= 0.0).any()) throw DomainError("certainty equivalent needs returns > -1");
    if (gamma == 1.0) return std::exp(w.log().mean()) - 1.0;
    const double e = 1.0 - gamma;
    return std::pow(w.pow(e).mean(), 1.0 / e) - 1.0;
}

}  // namespace wheelhouse::metrics
