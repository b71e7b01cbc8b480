#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/inference.hpp"
#include "wheelhouse/sim/features.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse::sim {

struct DecisionRequest {
    MarketFeatures features;
    PsychologicalState psych;
    FactorStates factors;  // market and portfolio states known at decision time
    double put_otm = 0.10;
    double position_limit = 0.10;
};

struct EngineDecision {
    inference::TradeDecision decision;
    // Newest trade record behind the probabilities, if any.
    std::optional<Date> latest_record_date;
    std::string structure_source;
    std::size_t decision_factors = 0;
    std::vector<std::string> diagnostics;
};

class DecisionEngine {
public:
    virtual ~DecisionEngine() = default;
    virtual std::string name() const = 0;
    virtual EngineDecision decide(const DecisionRequest& request) = 0;
    // Drop cached structures; the next decision per ticker regenerates.
    virtual void retrain(Date /*as_of*/) {}
    // A put chain closed; `record` carries its factors and outcome.
    virtual void observe(const TradeRecord& /*record*/, const FeedbackRecord& /*feedback*/) {}
};

// Sells a put at the configured OTM% and position limit every time.
class RuleEngine : public DecisionEngine {
public:
    std::string name() const override { return "rule"; }
    EngineDecision decide(const DecisionRequest& request) override;
};

// Candidates at put_otm, put_otm - 3% and put_otm - 6% (those above zero),
// each at the position limit.
std::vector<inference::Candidate> default_candidates(double put_otm, double position_limit);

struct BayesianEngineConfig {
    GenerationConfig generation;
    PopulationPolicies population;
    inference::DecisionConfig decision;
    std::size_t feedback_digest = kDefaultFeedbackDigest;
    FactorSchema schema = FactorSchema::defaults();
    TradingCalendar calendar;
};

// Structure from the LLM (with fallbacks) per ticker and retrain period, CPTs
// repopulated from the accumulated store at every decision, then
// decide_trade over the candidates. The second constructor pins one
// structure for every ticker and period instead.
class BayesianEngine : public DecisionEngine {
public:
    BayesianEngine(LlmClient& client, BayesianEngineConfig config, TradeStore seed_store = {});
    BayesianEngine(bn::NetworkStructure fixed, BayesianEngineConfig config, TradeStore seed_store = {});

    std::string name() const override { return "bayesian"; }
    EngineDecision decide(const DecisionRequest& request) override;
    void retrain(Date as_of) override;
    void observe(const TradeRecord& record, const FeedbackRecord& feedback) override;

    const TradeStore& store() const { return store_; }
    const std::vector<FeedbackRecord>& feedback() const { return feedback_; }
    std::size_t generations() const { return generations_; }
    const std::map<std::string, std::size_t>& provenance_counts() const { return provenance_counts_; }

private:
    LlmClient* client_ = nullptr;
    std::optional<bn::NetworkStructure> fixed_;
    BayesianEngineConfig config_;
    TradeStore store_;
    std::vector<FeedbackRecord> feedback_;
    std::map<std::string, GenerationResult> structures_;
    std::size_t generations_ = 0;
    std::map<std::string, std::size_t> provenance_counts_;
};

}  // namespace wheelhouse::sim
