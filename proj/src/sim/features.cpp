#include "wheelhouse/sim/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"

namespace wheelhouse::sim {

namespace v = bn::var;

namespace {

double window_return(const std::vector<Bar>& bars, std::size_t last, int window) {
    const std::size_t first = last >= static_cast<std::size_t>(window) ? last - window : 0;
    return bars[last].close / bars[first].close - 1.0;
}

double realized_volatility(const std::vector<Bar>& bars, std::size_t last, int window) {
    const std::size_t first = last >= static_cast<std::size_t>(window) ? last - window : 0;
    std::vector<double> r;
    for (std::size_t i = first + 1; i <= last; ++i) r.push_back(std::log(bars[i].close / bars[i - 1].close));
    if (r.size() < 2) return 0.0;
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
    double ss = 0.0;
    for (double x : r) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (r.size() - 1) * 252.0);
}

// Cutler RSI: plain sums of gains and losses over the window.
double rsi(const std::vector<Bar>& bars, std::size_t last, int window) {
    const std::size_t first = last >= static_cast<std::size_t>(window) ? last - window : 0;
    double gain = 0.0, loss = 0.0;
    for (std::size_t i = first + 1; i <= last; ++i) {
        const double d = bars[i].close - bars[i - 1].close;
        (d > 0 ? gain : loss) += std::abs(d);
    }
    if (gain + loss == 0.0) return 50.0;
    return 100.0 * gain / (gain + loss);
}

}  // namespace

void check_feature_config(const FeatureConfig& c) {
    for (int w : {c.volatility_window, c.regime_window, c.trend_window, c.rsi_window, c.fundamentals_window,
                  c.adv_window, c.range_window})
        if (w < 1) throw ConfigError("feature windows must be at least 1");
    if (!(c.volatility_floor >= 0.0)) throw ConfigError("volatility floor must be non-negative");
    if (!(c.rsi_oversold < c.rsi_overbought)) throw ConfigError("RSI bands must satisfy oversold < overbought");
    if (!(c.volatility.low_below < c.volatility.high_at)) throw ConfigError("volatility thresholds out of order");
}

MarketFeatures compute_features(const BarSeries& series, Date decision_date, const FeatureConfig& c) {
    const auto idx = series.index_on_or_before(decision_date - 1);
    if (!idx)
        throw DataError("no bar for " + series.ticker + " before " + decision_date.to_string());
    const auto& bars = series.bars;
    const std::size_t last = *idx;

    MarketFeatures f;
    f.ticker = series.ticker;
    f.decision_date = decision_date;
    f.feature_date = bars[last].date;
    f.last_close = bars[last].close;
    f.realized_volatility = realized_volatility(bars, last, c.volatility_window);
    f.volatility = std::max(f.realized_volatility, c.volatility_floor);
    f.vix = f.realized_volatility * 100.0;

    f.regime_return = window_return(bars, last, c.regime_window);
    f.regime = f.regime_return > c.regime_threshold    ? MarketRegime::bull
               : f.regime_return < -c.regime_threshold ? MarketRegime::bear
                                                       : MarketRegime::neutral;
    f.trend_return = window_return(bars, last, c.trend_window);
    f.trend = f.trend_return > c.trend_threshold    ? Trend::up
              : f.trend_return < -c.trend_threshold ? Trend::down
                                                    : Trend::sideways;
    f.fundamentals_return = window_return(bars, last, c.fundamentals_window);
    f.rsi = rsi(bars, last, c.rsi_window);

    const std::size_t adv_first = last + 1 >= static_cast<std::size_t>(c.adv_window) ? last + 1 - c.adv_window : 0;
    double volume = 0.0;
    for (std::size_t i = adv_first; i <= last; ++i) volume += bars[i].volume;
    f.adv = volume / static_cast<double>(last - adv_first + 1);
    f.volume_ratio = f.adv > 0.0 ? bars[last].volume / f.adv : 1.0;

    const std::size_t range_first =
        last + 1 >= static_cast<std::size_t>(c.range_window) ? last + 1 - c.range_window : 0;
    double lo = bars[last].close, hi = bars[last].close;
    for (std::size_t i = range_first; i <= last; ++i) {
        lo = std::min(lo, bars[i].close);
        hi = std::max(hi, bars[i].close);
    }
    f.range_position = hi > lo ? (bars[last].close - lo) / (hi - lo) : 0.5;
    return f;
}

MarketContext to_context(const MarketFeatures& f) {
    MarketContext ctx;
    ctx.ticker = f.ticker;
    ctx.current_price = f.last_close;
    ctx.volatility = f.volatility;
    ctx.trend = f.trend;
    ctx.vix = f.vix;
    ctx.market_regime = f.regime;
    ctx.avg_daily_volume = f.adv;
    ctx.date = f.decision_date;
    return ctx;
}

std::string level_of(double score) {
    if (score >= 2.0 / 3.0) return "High";
    if (score < 1.0 / 3.0) return "Low";
    return "Medium";
}

FactorStates market_factor_states(const MarketFeatures& f, const FeatureConfig& c, double relative_return) {
    FactorStates s;
    s[v::market_regime] = to_string(f.regime);
    s[v::volatility_level] = volatility_level(f.volatility, c.volatility);
    s[v::stock_fundamentals] = f.fundamentals_return > c.fundamentals_threshold    ? "Strong"
                               : f.fundamentals_return < -c.fundamentals_threshold ? "Weak"
                                                                                   : "Moderate";
    s[v::technical_position] = f.rsi < c.rsi_oversold     ? "Oversold"
                               : f.rsi > c.rsi_overbought ? "Overbought"
                                                          : "Neutral";
    s["Trend_Direction"] = f.trend == Trend::up ? "Up" : f.trend == Trend::down ? "Down" : "Sideways";
    s["VIX_Level"] = f.vix >= 30.0 ? "High" : f.vix < 18.0 ? "Low" : "Medium";
    s["Volume_Level"] = f.volume_ratio > 1.25 ? "High" : f.volume_ratio < 0.75 ? "Low" : "Medium";
    s["Momentum"] = f.trend_return > 0.01 ? "Positive" : f.trend_return < -0.01 ? "Negative" : "Flat";
    s["Price_Range_Position"] = f.range_position >= 2.0 / 3.0 ? "High"
                                : f.range_position < 1.0 / 3.0 ? "Low"
                                                                : "Middle";
    // Reports assumed around the 25th of Jan/Apr/Jul/Oct.
    const Date d = f.decision_date;
    Date next_report{d.year(), static_cast<unsigned>(((d.month() - 1) / 3) * 3 + 1), 25};
    while (next_report < d) next_report = next_report.add_months(3);
    const int days = next_report - d;
    s["Earnings_Proximity"] = days <= 14 ? "Near" : days <= 45 ? "Mid" : "Far";
    s["Sector_Strength"] = relative_return > 0.02 ? "Strong" : relative_return < -0.02 ? "Weak" : "Neutral";
    return s;
}

const char* to_string(ExpiryCycle cycle) { return cycle == ExpiryCycle::weekly ? "weekly" : "monthly"; }

ExpiryCycle parse_expiry_cycle(std::string_view text) {
    if (text == "weekly") return ExpiryCycle::weekly;
    if (text == "monthly") return ExpiryCycle::monthly;
    throw ConfigError("expiry cycle must be weekly or monthly, got '" + std::string(text) + "'");
}

Date next_expiry(Date from, ExpiryCycle cycle) {
    const Date earliest = from + 7;
    if (cycle == ExpiryCycle::weekly) return earliest + static_cast<int>((5 + 7 - earliest.weekday()) % 7);
    Date month_start{earliest.year(), earliest.month(), 1};
    for (;;) {
        const Date first_friday = month_start + static_cast<int>((5 + 7 - month_start.weekday()) % 7);
        const Date third_friday = first_friday + 14;
        if (third_friday >= earliest) return third_friday;
        month_start = month_start.add_months(1);
    }
}

}  // namespace wheelhouse::sim
