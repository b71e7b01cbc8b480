#include "wheelhouse/context.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "wheelhouse/error.hpp"

namespace wheelhouse {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

const char* to_string(Trend trend) {
    switch (trend) {
        case Trend::up: return "up";
        case Trend::down: return "down";
        case Trend::sideways: return "sideways";
    }
    return "sideways";
}

const char* to_string(MarketRegime regime) {
    switch (regime) {
        case MarketRegime::bull: return "Bull";
        case MarketRegime::neutral: return "Neutral";
        case MarketRegime::bear: return "Bear";
    }
    return "Neutral";
}

const char* to_string(TradeOutcome outcome) {
    switch (outcome) {
        case TradeOutcome::profit: return "Profit";
        case TradeOutcome::breakeven: return "Breakeven";
        case TradeOutcome::loss: return "Loss";
    }
    return "Breakeven";
}

Trend parse_trend(std::string_view text) {
    const auto t = lower(text);
    if (t == "up") return Trend::up;
    if (t == "down") return Trend::down;
    if (t == "sideways") return Trend::sideways;
    throw DomainError("unknown trend '" + std::string(text) + "'");
}

MarketRegime parse_regime(std::string_view text) {
    const auto t = lower(text);
    if (t == "bull") return MarketRegime::bull;
    if (t == "neutral") return MarketRegime::neutral;
    if (t == "bear") return MarketRegime::bear;
    throw DomainError("unknown market regime '" + std::string(text) + "'");
}

TradeOutcome parse_outcome(std::string_view text) {
    const auto t = lower(text);
    if (t == "profit") return TradeOutcome::profit;
    if (t == "breakeven") return TradeOutcome::breakeven;
    if (t == "loss") return TradeOutcome::loss;
    throw DomainError("unknown trade outcome '" + std::string(text) + "'");
}

void check_context(const MarketContext& c) {
    if (!(c.current_price > 0.0) || !std::isfinite(c.current_price))
        throw DomainError("market context: current_price must be positive");
    if (!(c.volatility >= 0.0) || !std::isfinite(c.volatility))
        throw DomainError("market context: volatility must be non-negative");
    if (!(c.vix >= 0.0) || !std::isfinite(c.vix)) throw DomainError("market context: vix must be non-negative");
    if (!(c.avg_daily_volume >= 0.0) || !std::isfinite(c.avg_daily_volume))
        throw DomainError("market context: avg_daily_volume must be non-negative");
}

void check_psychological_state(const PsychologicalState& s) {
    for (double v : {s.fomo_level, s.confidence_level, s.stress_level, s.tilt_risk})
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("psychological state fields must lie in [0, 1]");
}

std::string volatility_level(double volatility, const VolatilityThresholds& t) {
    if (volatility < t.low_below) return "Low";
    if (volatility < t.high_at) return "Medium";
    return "High";
}

}  // namespace wheelhouse
