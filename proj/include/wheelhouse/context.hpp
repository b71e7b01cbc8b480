#pragma once

#include <string>
#include <string_view>

#include "wheelhouse/date.hpp"

namespace wheelhouse {

enum class Trend { up, down, sideways };
enum class MarketRegime { bull, neutral, bear };
enum class TradeOutcome { profit, breakeven, loss };

const char* to_string(Trend trend);
const char* to_string(MarketRegime regime);  // "Bull" / "Neutral" / "Bear"
const char* to_string(TradeOutcome outcome);  // "Profit" / "Breakeven" / "Loss"
Trend parse_trend(std::string_view text);
MarketRegime parse_regime(std::string_view text);
// Throws DomainError for anything but Profit/Breakeven/Loss (case-insensitive).
TradeOutcome parse_outcome(std::string_view text);

struct MarketContext {
    std::string ticker;
    double current_price = 0.0;
    double volatility = 0.0;  // annualized
    Trend trend = Trend::sideways;
    double vix = 0.0;
    MarketRegime market_regime = MarketRegime::neutral;
    double avg_daily_volume = 0.0;  // shares/day
    Date date;
};

// Throws DomainError on a non-positive price or negative/non-finite
// volatility, VIX or volume.
void check_context(const MarketContext& context);

struct PsychologicalState {
    double fomo_level = 0.0;
    double confidence_level = 0.0;
    double stress_level = 0.0;
    double tilt_risk = 0.0;
};

void check_psychological_state(const PsychologicalState& state);

// Annualized volatility cut points: Low < low_below <= Medium < high_at <= High.
struct VolatilityThresholds {
    double low_below = 0.20;
    double high_at = 0.40;
};

std::string volatility_level(double volatility, const VolatilityThresholds& thresholds = {});

}  // namespace wheelhouse
