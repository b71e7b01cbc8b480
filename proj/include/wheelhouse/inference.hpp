#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wheelhouse/bn/network.hpp"

namespace wheelhouse::inference {

using Evidence = std::map<std::string, std::string>;

struct Posterior {
    std::string variable;
    std::vector<std::string> states;
    Eigen::VectorXd probabilities;

    double probability(std::string_view state) const;
};

// Exact P(query | evidence) by variable elimination over the CPT factors.
// Elimination order: min-degree on the interaction graph, ties broken by
// variable name. Throws InconsistentEvidence when P(evidence) == 0 and
// DomainError for unknown variables/states or a query that is also evidence.
Posterior posterior(const bn::BayesianNetwork& network, const std::string& query,
                    const Evidence& evidence);

// Elimination order posterior() uses for this query.
std::vector<std::string> elimination_order(const bn::BayesianNetwork& network,
                                           const std::string& query, const Evidence& evidence);

inline constexpr std::size_t kBruteForceMaxNodes = 12;

// Reference implementation: enumerates the full joint through
// bn::joint_probability. Refuses networks above kBruteForceMaxNodes.
Posterior brute_force_posterior(const bn::BayesianNetwork& network, const std::string& query,
                                const Evidence& evidence);

enum class Action { sell_put, roll, hold, sell_call, skip };
const char* to_string(Action action);

struct Candidate {
    double strike_otm_pct = 0.10;
    double position_fraction = 0.10;
};

struct DecisionConfig {
    // Weight on P(Assignment_Probability=High) in the candidate score.
    double risk_aversion = 1.0;
    // OTM% >= conservative_min_otm -> Conservative; < aggressive_max_otm -> Aggressive.
    double conservative_min_otm = 0.10;
    double aggressive_max_otm = 0.05;
    double position_cap = 0.10;
    // Best score below this yields Action::skip.
    std::optional<double> min_score;
    // Scores closer than this are ties.
    double tie_tolerance = 1e-12;
};

std::string strike_selection_for(double strike_otm_pct, const DecisionConfig& config);

enum class Influence { increases, decreases, none };
const char* to_string(Influence influence);

// One evidence variable's leave-one-out effect on P(Assignment_Probability=High).
struct RationaleItem {
    std::string factor;
    std::string state;
    double delta = 0.0;
    Influence direction = Influence::none;
};

struct TradeDecision {
    Action action = Action::skip;
    double strike_otm_pct = 0.0;
    double position_fraction = 0.0;
    std::string strike_selection;
    double score = 0.0;
    Posterior expected_outcome;  // over Trade_Outcome
    Posterior assignment_risk;   // over Assignment_Probability
    std::vector<RationaleItem> rationale;
    std::string network_id;
};

// Scores each candidate as P(Trade_Outcome=Profit) - risk_aversion *
// P(Assignment_Probability=High) with Strike_Selection fixed by the
// candidate's OTM%. Highest score wins; ties go to the larger OTM% and then
// the smaller position. Position fractions are clamped to the cap.
TradeDecision decide_trade(const bn::BayesianNetwork& network, const Evidence& evidence,
                           std::span<const Candidate> candidates, const DecisionConfig& config,
                           std::string network_id = {});

// Leave-one-out deltas for every variable in `evidence` (Strike_Selection
// excluded), conditioning on `evidence` plus the chosen strike when given.
// Sorted by |delta| descending, then by name.
std::vector<RationaleItem> assignment_risk_drivers(const bn::BayesianNetwork& network,
                                                   const Evidence& evidence,
                                                   const std::string& strike_selection = {});

std::string explain_decision(const bn::BayesianNetwork& network, const Evidence& evidence,
                             const TradeDecision& decision);

nlohmann::ordered_json posterior_to_json(const Posterior& posterior);
nlohmann::ordered_json decision_to_json(const TradeDecision& decision);

}  // namespace wheelhouse::inference
