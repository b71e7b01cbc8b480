#include "wheelhouse/sim/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "wheelhouse/error.hpp"

namespace wheelhouse::sim {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

const char* to_string(OptionType type) { return type == OptionType::put ? "put" : "call"; }

double black_scholes(double spot, double strike, double vol, double years, double rate, OptionType type) {
    if (!(spot > 0.0) || !(strike > 0.0)) throw DomainError("option pricing needs positive spot and strike");
    if (!(vol >= 0.0) || !(years >= 0.0)) throw DomainError("option pricing needs non-negative volatility and time");
    const double discount = std::exp(-rate * years);
    const double forward_intrinsic =
        type == OptionType::put ? strike * discount - spot : spot - strike * discount;
    const double sigma_t = vol * std::sqrt(years);
    if (sigma_t == 0.0) return std::max(forward_intrinsic, 0.0);
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * years) / sigma_t;
    const double d2 = d1 - sigma_t;
    const double value = type == OptionType::call ? spot * normal_cdf(d1) - strike * discount * normal_cdf(d2)
                                                  : strike * discount * normal_cdf(-d2) - spot * normal_cdf(-d1);
    return std::max(value, 0.0);
}

double price_option_premium(double spot, double strike, double vol, int days, double rate, OptionType type) {
    if (days <= 0) throw DomainError("days to expiry must be positive");
    return black_scholes(spot, strike, vol, days / 365.0, rate, type);
}

void check_cost_model(const CostModel& m) {
    for (double v : {m.commission_per_contract, m.exchange_fee_per_contract, m.min_commission, m.slippage_put,
                     m.slippage_call})
        if (!(v >= 0.0)) throw ConfigError("cost model values must be non-negative");
}

TradeCosts trade_costs(const CostModel& m, OptionType type, int contracts, double gross_premium) {
    if (!m.enabled || contracts <= 0) return {};
    const double per_contract = m.commission_per_contract + m.exchange_fee_per_contract;
    TradeCosts c;
    c.commission = std::max(per_contract * contracts, m.min_commission);
    c.slippage = (type == OptionType::put ? m.slippage_put : m.slippage_call) * std::abs(gross_premium);
    return c;
}

double round_to_strike(double price) {
    if (price < 25.0) return std::round(price * 2.0) / 2.0;
    return std::round(price);
}

}  // namespace wheelhouse::sim
