#pragma once

#include <vector>

#include "wheelhouse/bn/network.hpp"

namespace wheelhouse::bn {

namespace var {
inline constexpr const char* market_regime = "Market_Regime";
inline constexpr const char* volatility_level = "Volatility_Level";
inline constexpr const char* stock_fundamentals = "Stock_Fundamentals";
inline constexpr const char* technical_position = "Technical_Position";
inline constexpr const char* strike_selection = "Strike_Selection";
inline constexpr const char* premium_rate = "Premium_Rate";
inline constexpr const char* assignment_probability = "Assignment_Probability";
inline constexpr const char* trade_outcome = "Trade_Outcome";
inline constexpr const char* psychological_state = "Psychological_State";
inline constexpr const char* risk_tolerance = "Risk_Tolerance";
}  // namespace var

// The eight core decision variables, three ordered states each.
const std::vector<Variable>& core_variables();

// Core variables followed by nineteen auxiliary factors: the default 27-factor
// trade schema. Auxiliary factors are editable through the schema manifest.
const std::vector<Variable>& default_factor_variables();

// States used for a node that appears in a structure but not in the schema.
std::vector<std::string> fallback_states();

}  // namespace wheelhouse::bn
