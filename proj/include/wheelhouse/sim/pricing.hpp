#pragma once

namespace wheelhouse::sim {

enum class OptionType { put, call };
const char* to_string(OptionType type);

// Black-Scholes price per share. Time in years. With zero volatility or
// zero time the value is the discounted intrinsic value. Throws DomainError
// for spot/strike <= 0, negative volatility or negative time.
double black_scholes(double spot, double strike, double volatility, double years, double rate, OptionType type);

// days_to_expiry is in calendar days (T = days / 365) and must be positive.
double price_option_premium(double spot, double strike, double volatility, int days_to_expiry, double rate,
                            OptionType type);

struct CostModel {
    bool enabled = true;
    double commission_per_contract = 0.65;
    double exchange_fee_per_contract = 0.10;
    double min_commission = 1.00;  // per trade, on commission plus fees
    double slippage_put = 0.0015;  // fraction of gross premium
    double slippage_call = 0.0012;
};

void check_cost_model(const CostModel& model);

struct TradeCosts {
    double commission = 0.0;
    double slippage = 0.0;
    double total() const { return commission + slippage; }
};

// Costs of one option trade of `contracts` with `gross_premium` in currency
// (premium per share x 100 x contracts).
TradeCosts trade_costs(const CostModel& model, OptionType type, int contracts, double gross_premium);

// Nearest 0.50 below 25, nearest 1.00 from 25 up.
double round_to_strike(double price);

}  // namespace wheelhouse::sim
