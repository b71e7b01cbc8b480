#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wheelhouse/bn/network.hpp"
#include "wheelhouse/context.hpp"
#include "wheelhouse/date.hpp"

namespace wheelhouse {

enum class TradeAction { sell_put, roll_put, assign, sell_call, expire_worthless, close };
const char* to_string(TradeAction action);
TradeAction parse_trade_action(std::string_view text);

using FactorStates = std::map<std::string, std::string>;

struct TradeRecord {
    std::string id;
    Date date;
    std::string ticker;
    TradeAction action = TradeAction::sell_put;
    double strike = 0.0;
    double premium = 0.0;  // per share
    int contracts = 1;
    std::optional<TradeOutcome> outcome;  // set once the trade closes
    FactorStates factors;
    double commission = 0.0;
    double slippage = 0.0;
    double cash_flow = 0.0;  // signed, net of costs
    std::string option_type;  // "put", "call", or empty

    friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

// Named factor variables and their legal states.
class FactorSchema {
public:
    FactorSchema() = default;
    explicit FactorSchema(std::vector<bn::Variable> variables);

    // The eight core variables plus nineteen auxiliary factors.
    static FactorSchema defaults();

    const std::vector<bn::Variable>& variables() const { return variables_; }
    const bn::Variable* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }
    std::size_t size() const { return variables_.size(); }

    friend bool operator==(const FactorSchema&, const FactorSchema&) = default;

private:
    std::vector<bn::Variable> variables_;
};

// Throws DataError for a negative premium, zero contracts, or a factor state
// the schema does not allow. Factors outside the schema are ignored.
void check_record(const TradeRecord& record, const FactorSchema& schema);

// Records ordered by date; equal dates keep insertion order.
class TradeStore {
public:
    TradeStore() = default;
    explicit TradeStore(std::vector<TradeRecord> records);

    void add(TradeRecord record);
    const std::vector<TradeRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

private:
    std::vector<TradeRecord> records_;
};

struct SelectionPolicy {
    int window_days = 252;  // trading days
    std::vector<std::string> match_keys{"Market_Regime", "Volatility_Level"};
    std::size_t min_sample = 30;
};

struct SmoothingPolicy {
    double pseudo_count = 1.0;
};

struct PopulationPolicies {
    SelectionPolicy selection;
    SmoothingPolicy smoothing;
    VolatilityThresholds volatility;
};

void check_policies(const PopulationPolicies& policies);

// Factor states implied by the context: Market_Regime and Volatility_Level.
FactorStates context_factor_states(const MarketContext& context, const VolatilityThresholds& thresholds = {});

// Records dated in [as_of - window_days trading days, as_of - 1 day]. Those
// matching the context on every match key come first; when fewer than
// min_sample match, the most recent records matching all but the last key
// (then the last two, ...) fill the gap. Within each tier: newest first, then
// id. Keys the context does not determine match anything.
std::vector<TradeRecord> select_relevant_trades(const TradeStore& store, const MarketContext& context, Date as_of,
                                                const SelectionPolicy& policy,
                                                const TradingCalendar& calendar = {},
                                                const VolatilityThresholds& thresholds = {});

struct CptEstimate {
    bn::Cpt cpt;
    Eigen::MatrixXd counts;  // rows x child states, parents in canonical order
    std::vector<std::string> contributing_ids;
    std::size_t skipped = 0;  // records lacking a key or holding an unknown state
};

// row[s] = (count[s] + a) / (row_total + a * |states|). A row with no data
// and a = 0 is uniform. Throws DomainError when the child has < 2 states.
CptEstimate estimate_cpt(std::span<const TradeRecord> records, const bn::Variable& child,
                         std::span<const bn::Variable> parents, const SmoothingPolicy& smoothing);

struct PopulationResult {
    bn::BayesianNetwork network;
    Date as_of;
    std::size_t selected = 0;
    // Sorted ids of records that entered at least one CPT.
    std::vector<std::string> provenance;
    std::optional<Date> latest_record_date;
    std::vector<std::string> diagnostics;
};

// Every node gets a CPT estimated from the selected records. Nodes missing
// from the schema get High/Medium/Low states and a uniform CPT.
PopulationResult populate_network(const bn::NetworkStructure& structure, const TradeStore& store,
                                  const MarketContext& context, Date as_of, const PopulationPolicies& policies,
                                  const FactorSchema& schema = FactorSchema::defaults(),
                                  const TradingCalendar& calendar = {});

}  // namespace wheelhouse
