#include "wheelhouse/sim/engine.hpp"

#include <algorithm>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"

namespace wheelhouse::sim {

namespace v = bn::var;

namespace {

bool has_decision_nodes(const bn::NetworkStructure& s) {
    for (const char* n : {v::strike_selection, v::assignment_probability, v::trade_outcome})
        if (std::find(s.nodes.begin(), s.nodes.end(), n) == s.nodes.end()) return false;
    return true;
}

bool is_decision_node(const std::string& name) {
    return name == v::strike_selection || name == v::premium_rate || name == v::assignment_probability ||
           name == v::trade_outcome;
}

}  // namespace

std::vector<inference::Candidate> default_candidates(double put_otm, double position_limit) {
    std::vector<inference::Candidate> out;
    for (double offset : {0.0, 0.03, 0.06})
        if (put_otm - offset > 1e-9) out.push_back({put_otm - offset, position_limit});
    return out;
}

EngineDecision RuleEngine::decide(const DecisionRequest& request) {
    EngineDecision out;
    auto& d = out.decision;
    d.action = inference::Action::sell_put;
    d.strike_otm_pct = request.put_otm;
    d.position_fraction = request.position_limit;
    d.strike_selection = inference::strike_selection_for(request.put_otm, {});
    d.network_id = "rule";
    out.structure_source = "rule";
    return out;
}

BayesianEngine::BayesianEngine(LlmClient& client, BayesianEngineConfig config, TradeStore seed_store)
    : client_(&client), config_(std::move(config)), store_(std::move(seed_store)) {
    check_generation_config(config_.generation);
    check_policies(config_.population);
}

BayesianEngine::BayesianEngine(bn::NetworkStructure fixed, BayesianEngineConfig config, TradeStore seed_store)
    : fixed_(std::move(fixed)), config_(std::move(config)), store_(std::move(seed_store)) {
    const auto report = bn::validate_structure(*fixed_);
    if (!report.valid()) throw StructureError("fixed structure is invalid: " + report.summary());
    if (!has_decision_nodes(*fixed_)) throw StructureError("fixed structure lacks the decision nodes");
    check_policies(config_.population);
}

void BayesianEngine::retrain(Date) { structures_.clear(); }

void BayesianEngine::observe(const TradeRecord& record, const FeedbackRecord& feedback) {
    store_.add(record);
    feedback_.push_back(feedback);
}

EngineDecision BayesianEngine::decide(const DecisionRequest& request) {
    EngineDecision out;
    const MarketContext ctx = to_context(request.features);
    const Date as_of = request.features.decision_date;

    auto it = structures_.find(ctx.ticker);
    if (it == structures_.end() && fixed_) {
        GenerationResult pinned;
        pinned.structure = *fixed_;
        it = structures_.emplace(ctx.ticker, std::move(pinned)).first;
        ++generations_;
        ++provenance_counts_["fixed"];
    }
    if (it == structures_.end()) {
        auto generated = generate_with_fallback(ctx, request.psych, feedback_, *client_, config_.generation,
                                                config_.feedback_digest);
        if (!has_decision_nodes(generated.structure)) {
            generated.diagnostics.push_back("generated structure lacks decision nodes; using predefined");
            generated.structure = predefined_structure(ctx.market_regime);
            generated.provenance = Provenance::predefined;
        }
        ++generations_;
        ++provenance_counts_[to_string(generated.provenance)];
        it = structures_.emplace(ctx.ticker, std::move(generated)).first;
    }
    const GenerationResult& gen = it->second;
    out.structure_source = fixed_ ? "fixed" : to_string(gen.provenance);

    auto population = populate_network(gen.structure, store_, ctx, as_of, config_.population, config_.schema,
                                       config_.calendar);
    out.latest_record_date = population.latest_record_date;
    out.diagnostics = std::move(population.diagnostics);

    inference::Evidence evidence;
    for (const auto& [name, state] : request.factors) {
        if (is_decision_node(name) || !population.network.contains(name)) continue;
        const auto& states = population.network.variable(name).states;
        if (std::find(states.begin(), states.end(), state) != states.end()) evidence[name] = state;
    }
    out.decision_factors = evidence.size();

    const auto candidates = default_candidates(request.put_otm, request.position_limit);
    auto decision_config = config_.decision;
    decision_config.position_cap = request.position_limit;
    const std::string network_id = ctx.ticker + "@" + as_of.to_string();
    try {
        out.decision = inference::decide_trade(population.network, evidence, candidates, decision_config, network_id);
    } catch (const InconsistentEvidence&) {
        out.diagnostics.push_back("evidence has zero probability; deciding without it");
        out.decision_factors = 0;
        out.decision = inference::decide_trade(population.network, {}, candidates, decision_config, network_id);
    }
    return out;
}

}  // namespace wheelhouse::sim
