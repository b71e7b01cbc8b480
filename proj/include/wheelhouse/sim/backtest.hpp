#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/data_io.hpp"
#include "wheelhouse/metrics.hpp"
#include "wheelhouse/sim/engine.hpp"
#include "wheelhouse/sim/features.hpp"
#include "wheelhouse/sim/pricing.hpp"

namespace wheelhouse::sim {

using MarketData = std::map<std::string, BarSeries>;

struct BacktestConfig {
    std::vector<std::string> tickers;  // empty: every ticker in the data
    Date start;
    Date end;
    double initial_capital = 100000.0;
    double put_otm = 0.10;
    double roll_trigger = 0.05;
    double position_limit = 0.10;
    double adv_cap = 0.05;
    ExpiryCycle cycle = ExpiryCycle::weekly;
    bool rolling = true;
    int retrain_months = 6;
    double risk_free_rate = 0.02;
    // Premium / strike per cycle below which a new put is not sold.
    double premium_threshold = 0.0;
    // |chain P&L| within this fraction of collateral counts as Breakeven.
    double breakeven_band = 0.001;
    std::uint64_t seed = 0;
    CostModel costs;
    FeatureConfig features;
    TradingCalendar calendar;
};

// Every field, dates as ISO strings, holidays sorted.
nlohmann::ordered_json backtest_config_json(const BacktestConfig& config);

// Throws ConfigError for fractions outside (0, 1], a non-positive capital or
// retrain interval, or tickers missing from `data`; DataError when a
// non-empty range is not covered by the data.
void check_backtest_config(const BacktestConfig& config, const MarketData& data);

struct TradeCounts {
    std::size_t puts_sold = 0;
    std::size_t puts_rolled = 0;
    std::size_t puts_expired = 0;
    std::size_t puts_assigned = 0;
    std::size_t calls_sold = 0;
    std::size_t calls_expired = 0;
    std::size_t calls_assigned = 0;
    std::size_t buy_to_close = 0;

    // Every logged event except the buy-to-close leg of a roll.
    std::size_t trades() const {
        return puts_sold + puts_rolled + puts_expired + puts_assigned + calls_sold + calls_expired + calls_assigned;
    }
    friend bool operator==(const TradeCounts&, const TradeCounts&) = default;
};

TradeCounts count_trades(const std::vector<TradeRecord>& log);

struct YearSummary {
    int year = 0;
    double start_equity = 0.0;
    double end_equity = 0.0;
    double return_ = 0.0;
    std::size_t trades = 0;
};

struct AuditEntry {
    std::string ticker;
    Date decision_date;
    Date feature_date;
    std::optional<Date> latest_record_date;
    Date execution_date;

    bool ok() const {
        return feature_date < decision_date && (!latest_record_date || *latest_record_date < decision_date) &&
               execution_date <= decision_date;
    }
};

struct LookAheadAudit {
    std::vector<AuditEntry> entries;
    std::size_t violations = 0;
    std::vector<Date> retrain_dates;
    double max_accounting_error = 0.0;
    std::size_t collateral_violations = 0;
    std::size_t adv_violations = 0;
};

struct BacktestResult {
    double initial_capital = 0.0;
    double final_equity = 0.0;
    TradeCounts counts;
    double gross_premium = 0.0;  // every sale, rolls included
    double buy_to_close_paid = 0.0;
    double commissions = 0.0;
    double slippage = 0.0;
    double realized_stock_pnl = 0.0;
    double premium_rate_cycle = 0.0;   // mean premium / strike per sale
    double premium_rate_annual = 0.0;  // the same, annualized by days to expiry
    metrics::EquityCurve curve;
    std::vector<double> option_liability;  // short-option marks, per curve date
    std::vector<YearSummary> years;
    LookAheadAudit audit;
    std::vector<TradeRecord> trade_log;
    std::vector<TradeRecord> closed_chains;
    std::vector<FeedbackRecord> feedback;
    std::size_t decisions = 0;
    std::size_t skipped_decisions = 0;
    double decision_factors_per_trade = 0.0;
    std::vector<std::string> diagnostics;
};

// Day loop over the union of bar dates in [start, end]. Decisions at day D
// see bars before D and records closed before D; fills use the close of D.
BacktestResult run_backtest(const BacktestConfig& config, const MarketData& data, DecisionEngine& engine);

// Summary keyed by the usual wheel-strategy report field names.
nlohmann::ordered_json summary_json(const BacktestResult& result);

// Replays the trade log from scratch and returns the largest gap, over all
// curve dates, between the recorded equity and cash + stock value - option
// liability rebuilt from the log and `data`.
double replay_max_equity_error(const BacktestResult& result, const BacktestConfig& config, const MarketData& data);

struct WalkForwardConfig {
    BacktestConfig base;  // start/end are replaced by the split below
    Date train_start;
    Date validate_start;
    Date test_start;
    Date end;
    std::vector<double> risk_aversion_grid{0.5, 1.0, 2.0};
    unsigned jobs = 1;
};

struct SegmentSummary {
    std::string name;
    Date start;
    Date end;
    double start_equity = 0.0;
    double end_equity = 0.0;
    double total_return = 0.0;
    std::optional<double> sharpe;
};

struct WalkForwardAudit {
    std::size_t temporal_violations = 0;
    bool boundaries_ordered = false;
    bool validation_runs_bounded = false;  // no grid run saw data past the validation end
    bool retrain_schedule_ok = false;
    std::vector<Date> retrain_dates;
    bool passed() const {
        return temporal_violations == 0 && boundaries_ordered && validation_runs_bounded && retrain_schedule_ok;
    }
};

struct WalkForwardResult {
    double selected_risk_aversion = 1.0;
    std::vector<std::pair<double, double>> validation_scores;  // (risk aversion, validation return)
    BacktestResult full;
    std::vector<SegmentSummary> segments;  // train, validate, test
    WalkForwardAudit audit;
};

using EngineFactory = std::function<std::unique_ptr<DecisionEngine>(double risk_aversion)>;

// Each grid value runs train+validate; the best validation return picks the
// risk aversion for a single run over the whole range, which is then split
// into segments.
WalkForwardResult run_walk_forward(const WalkForwardConfig& config, const MarketData& data,
                                   const EngineFactory& factory);

nlohmann::ordered_json walk_forward_json(const WalkForwardResult& result);

}  // namespace wheelhouse::sim
