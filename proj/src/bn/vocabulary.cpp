#include "wheelhouse/bn/vocabulary.hpp"

namespace wheelhouse::bn {

const std::vector<Variable>& core_variables() {
    static const std::vector<Variable> vars{
        {var::market_regime, {"Bull", "Neutral", "Bear"}},
        {var::volatility_level, {"High", "Medium", "Low"}},
        {var::stock_fundamentals, {"Strong", "Moderate", "Weak"}},
        {var::technical_position, {"Oversold", "Neutral", "Overbought"}},
        {var::strike_selection, {"Conservative", "Moderate", "Aggressive"}},
        {var::premium_rate, {"High", "Medium", "Low"}},
        {var::assignment_probability, {"High", "Medium", "Low"}},
        {var::trade_outcome, {"Profit", "Breakeven", "Loss"}},
    };
    return vars;
}

const std::vector<Variable>& default_factor_variables() {
    static const std::vector<Variable> vars = [] {
        std::vector<Variable> v = core_variables();
        const std::vector<Variable> aux{
            {var::psychological_state, {"Calm", "Neutral", "Stressed"}},
            {var::risk_tolerance, {"High", "Medium", "Low"}},
            {"Trend_Direction", {"Up", "Sideways", "Down"}},
            {"VIX_Level", {"High", "Medium", "Low"}},
            {"Volume_Level", {"High", "Medium", "Low"}},
            {"Days_To_Expiry", {"Short", "Medium", "Long"}},
            {"Position_Size", {"Small", "Medium", "Large"}},
            {"OTM_Band", {"Deep", "Standard", "Near"}},
            {"Momentum", {"Positive", "Flat", "Negative"}},
            {"Drawdown_State", {"None", "Moderate", "Severe"}},
            {"Portfolio_Utilization", {"Low", "Medium", "High"}},
            {"Confidence_Level", {"High", "Medium", "Low"}},
            {"FOMO_Level", {"High", "Medium", "Low"}},
            {"Tilt_Risk", {"High", "Medium", "Low"}},
            {"Recent_Outcome", {"Profit", "Breakeven", "Loss"}},
            {"Roll_Count", {"Zero", "One", "Multiple"}},
            {"Price_Range_Position", {"Low", "Middle", "High"}},
            {"Earnings_Proximity", {"Near", "Mid", "Far"}},
            {"Sector_Strength", {"Strong", "Neutral", "Weak"}},
        };
        v.insert(v.end(), aux.begin(), aux.end());
        return v;
    }();
    return vars;
}

std::vector<std::string> fallback_states() { return {"High", "Medium", "Low"}; }

}  // namespace wheelhouse::bn
