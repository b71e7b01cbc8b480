#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/inference.hpp"

namespace wheelhouse::inference {

namespace var = bn::var;

const char* to_string(Action action) {
    switch (action) {
        case Action::sell_put: return "sell_put";
        case Action::roll: return "roll";
        case Action::hold: return "hold";
        case Action::sell_call: return "sell_call";
        case Action::skip: return "skip";
    }
    return "skip";
}

const char* to_string(Influence influence) {
    switch (influence) {
        case Influence::increases: return "increases";
        case Influence::decreases: return "decreases";
        case Influence::none: return "none";
    }
    return "none";
}

std::string strike_selection_for(double otm, const DecisionConfig& config) {
    if (otm >= config.conservative_min_otm) return "Conservative";
    if (otm >= config.aggressive_max_otm) return "Moderate";
    return "Aggressive";
}

namespace {

Evidence with_strike(Evidence evidence, const std::string& strike_selection) {
    if (!strike_selection.empty()) evidence[var::strike_selection] = strike_selection;
    return evidence;
}

std::string format_delta(double delta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.3f", delta);
    std::string s = buf;
    if (s == "+0.000" || s == "-0.000") s = "0.000";
    return s;
}

}  // namespace

std::vector<RationaleItem> assignment_risk_drivers(const bn::BayesianNetwork& network, const Evidence& evidence,
                                                   const std::string& strike_selection) {
    const Evidence full = with_strike(evidence, strike_selection);
    const double base = posterior(network, var::assignment_probability, full).probability("High");

    std::vector<RationaleItem> items;
    for (const auto& [factor, state] : evidence) {
        if (factor == var::strike_selection && !strike_selection.empty()) continue;
        Evidence reduced = full;
        reduced.erase(factor);
        const double without = posterior(network, var::assignment_probability, reduced).probability("High");
        RationaleItem item{factor, state, base - without, Influence::none};
        if (item.delta > 0.0) item.direction = Influence::increases;
        else if (item.delta < 0.0) item.direction = Influence::decreases;
        items.push_back(std::move(item));
    }
    std::stable_sort(items.begin(), items.end(), [](const RationaleItem& a, const RationaleItem& b) {
        if (std::abs(a.delta) != std::abs(b.delta)) return std::abs(a.delta) > std::abs(b.delta);
        return a.factor < b.factor;
    });
    return items;
}

TradeDecision decide_trade(const bn::BayesianNetwork& network, const Evidence& evidence,
                           std::span<const Candidate> candidates, const DecisionConfig& config,
                           std::string network_id) {
    if (candidates.empty()) throw DomainError("decide_trade needs at least one candidate");
    for (const char* required : {var::strike_selection, var::assignment_probability, var::trade_outcome})
        if (!network.contains(required))
            throw DomainError(std::string("decision network lacks ") + required);

    struct Scored {
        Candidate candidate;
        std::string strike;
        double score;
        Posterior outcome;
        Posterior risk;
    };
    std::map<std::string, std::pair<Posterior, Posterior>> cache;
    std::optional<Scored> best;
    for (auto c : candidates) {
        if (!(c.strike_otm_pct >= 0.0) || !(c.position_fraction >= 0.0))
            throw DomainError("candidate with negative OTM% or position fraction");
        c.position_fraction = std::min(c.position_fraction, config.position_cap);
        const auto strike = strike_selection_for(c.strike_otm_pct, config);
        auto it = cache.find(strike);
        if (it == cache.end()) {
            const Evidence ev = with_strike(evidence, strike);
            it = cache.emplace(strike, std::pair{posterior(network, var::trade_outcome, ev),
                                                 posterior(network, var::assignment_probability, ev)})
                     .first;
        }
        const auto& [outcome, risk] = it->second;
        const double score = outcome.probability("Profit") - config.risk_aversion * risk.probability("High");
        bool better = !best;
        if (best) {
            if (score > best->score + config.tie_tolerance) better = true;
            else if (std::abs(score - best->score) <= config.tie_tolerance) {
                if (c.strike_otm_pct > best->candidate.strike_otm_pct) better = true;
                else if (c.strike_otm_pct == best->candidate.strike_otm_pct &&
                         c.position_fraction < best->candidate.position_fraction)
                    better = true;
            }
        }
        if (better) best = Scored{c, strike, score, outcome, risk};
    }

    TradeDecision d;
    d.action = (config.min_score && best->score < *config.min_score) ? Action::skip : Action::sell_put;
    d.strike_otm_pct = best->candidate.strike_otm_pct;
    d.position_fraction = best->candidate.position_fraction;
    d.strike_selection = best->strike;
    d.score = best->score;
    d.expected_outcome = best->outcome;
    d.assignment_risk = best->risk;
    d.rationale = assignment_risk_drivers(network, evidence, best->strike);
    d.network_id = std::move(network_id);
    return d;
}

std::string explain_decision(const bn::BayesianNetwork& network, const Evidence& evidence,
                             const TradeDecision& decision) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "Decision: %s at %.1f%% OTM (%s), position %.1f%% of portfolio\n",
                  to_string(decision.action), decision.strike_otm_pct * 100.0, decision.strike_selection.c_str(),
                  decision.position_fraction * 100.0);
    out << buf;
    if (decision.expected_outcome.probabilities.size() > 0 && decision.assignment_risk.probabilities.size() > 0) {
        std::snprintf(buf, sizeof buf, "P(Trade_Outcome=Profit) = %.3f, P(Assignment_Probability=High) = %.3f\n",
                      decision.expected_outcome.probability("Profit"), decision.assignment_risk.probability("High"));
        out << buf;
    }
    Evidence factors = evidence;
    if (!decision.strike_selection.empty()) factors.erase(bn::var::strike_selection);
    if (factors.empty()) {
        out << "prior-only decision: no market evidence supplied\n";
        return out.str();
    }
    out << "Assignment-risk drivers (leave-one-out):\n";
    for (const auto& item : assignment_risk_drivers(network, evidence, decision.strike_selection))
        out << "  " << item.factor << "=" << item.state << ": " << format_delta(item.delta) << " assignment risk\n";
    return out.str();
}

nlohmann::ordered_json posterior_to_json(const Posterior& p) {
    nlohmann::ordered_json dist = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < p.states.size(); ++i) dist[p.states[i]] = p.probabilities[static_cast<Eigen::Index>(i)];
    return {{"variable", p.variable}, {"distribution", std::move(dist)}};
}

nlohmann::ordered_json decision_to_json(const TradeDecision& d) {
    nlohmann::ordered_json rationale = nlohmann::ordered_json::array();
    for (const auto& r : d.rationale)
        rationale.push_back({{"factor", r.factor}, {"state", r.state}, {"delta", r.delta},
                             {"direction", to_string(r.direction)}});
    nlohmann::ordered_json posteriors = nlohmann::ordered_json::object();
    if (!d.expected_outcome.variable.empty()) posteriors[d.expected_outcome.variable] = posterior_to_json(d.expected_outcome)["distribution"];
    if (!d.assignment_risk.variable.empty()) posteriors[d.assignment_risk.variable] = posterior_to_json(d.assignment_risk)["distribution"];
    return {{"action", to_string(d.action)},
            {"strike_otm_pct", d.strike_otm_pct},
            {"position_fraction", d.position_fraction},
            {"strike_selection", d.strike_selection},
            {"score", d.score},
            {"posteriors", std::move(posteriors)},
            {"rationale", std::move(rationale)},
            {"network_id", d.network_id}};
}

}  // namespace wheelhouse::inference
