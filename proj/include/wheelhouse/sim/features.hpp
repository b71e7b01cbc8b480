#pragma once

#include <string>

#include "wheelhouse/context.hpp"
#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/data_io.hpp"
#include "wheelhouse/date.hpp"

namespace wheelhouse::sim {

struct FeatureConfig {
    int volatility_window = 21;
    double volatility_floor = 0.05;
    int regime_window = 63;
    double regime_threshold = 0.05;
    int trend_window = 21;
    double trend_threshold = 0.02;
    int rsi_window = 14;
    double rsi_oversold = 30.0;
    double rsi_overbought = 70.0;
    int fundamentals_window = 252;
    double fundamentals_threshold = 0.10;
    int adv_window = 20;
    int range_window = 252;
    VolatilityThresholds volatility;
};

void check_feature_config(const FeatureConfig& config);

// Everything here comes from bars dated strictly before `decision_date`.
struct MarketFeatures {
    std::string ticker;
    Date decision_date;
    Date feature_date;  // date of the last bar used
    double last_close = 0.0;
    double volatility = 0.0;  // annualized, floored
    double realized_volatility = 0.0;
    Trend trend = Trend::sideways;
    MarketRegime regime = MarketRegime::neutral;
    double vix = 0.0;  // realized volatility x 100
    double rsi = 50.0;
    double regime_return = 0.0;
    double trend_return = 0.0;
    double fundamentals_return = 0.0;
    double adv = 0.0;            // shares/day
    double volume_ratio = 1.0;   // last volume / adv
    double range_position = 0.5; // 0 at the window low, 1 at the high
};

// Throws DataError when no bar precedes `decision_date`. Shorter histories
// than a window use what is available.
MarketFeatures compute_features(const BarSeries& series, Date decision_date, const FeatureConfig& config);

MarketContext to_context(const MarketFeatures& features);

// Market-derived factor states: the four market core variables plus trend,
// VIX, volume, momentum, range position and a quarterly earnings-cycle
// proxy. Sector_Strength compares `relative_return` (ticker minus peer mean)
// against +-2%.
FactorStates market_factor_states(const MarketFeatures& features, const FeatureConfig& config,
                                  double relative_return = 0.0);

// Level bucket for a [0, 1] score: High >= 2/3, Low < 1/3.
std::string level_of(double score);

// Calendar helpers for expiries. Weekly: first Friday at least 7 days after
// `from`. Monthly: first third-Friday at least 7 days after `from`.
enum class ExpiryCycle { weekly, monthly };
const char* to_string(ExpiryCycle cycle);
ExpiryCycle parse_expiry_cycle(std::string_view text);
Date next_expiry(Date from, ExpiryCycle cycle);

}  // namespace wheelhouse::sim
