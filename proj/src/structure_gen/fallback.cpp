#include <algorithm>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse {

namespace {

void add_edge(bn::NetworkStructure& s, const std::string& from, const std::string& to) {
    for (const auto& n : {from, to})
        if (std::find(s.nodes.begin(), s.nodes.end(), n) == s.nodes.end()) s.nodes.push_back(n);
    const bn::Edge e{from, to};
    if (std::find(s.edges.begin(), s.edges.end(), e) == s.edges.end()) s.edges.push_back(e);
}

}  // namespace

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::llm: return "llm";
        case Provenance::template_: return "template";
        case Provenance::predefined: return "predefined";
    }
    return "predefined";
}

bn::NetworkStructure predefined_structure(MarketRegime regime) {
    namespace v = bn::var;
    bn::NetworkStructure s;
    for (const auto& v : bn::core_variables()) s.nodes.push_back(v.name);
    add_edge(s, v::volatility_level, v::strike_selection);
    add_edge(s, v::market_regime, v::assignment_probability);
    add_edge(s, v::strike_selection, v::assignment_probability);
    add_edge(s, v::strike_selection, v::premium_rate);
    add_edge(s, v::volatility_level, v::premium_rate);
    add_edge(s, v::assignment_probability, v::trade_outcome);
    add_edge(s, v::premium_rate, v::trade_outcome);
    add_edge(s, v::stock_fundamentals, v::trade_outcome);
    switch (regime) {
        case MarketRegime::bull:
            add_edge(s, v::technical_position, v::strike_selection);
            s.reasoning = "Bull predefined: momentum shapes strike choice";
            break;
        case MarketRegime::neutral:
            add_edge(s, v::technical_position, v::assignment_probability);
            s.reasoning = "Neutral predefined: technical extremes drive assignment";
            break;
        case MarketRegime::bear:
            add_edge(s, v::technical_position, v::premium_rate);
            add_edge(s, v::volatility_level, v::assignment_probability);
            s.reasoning = "Bear predefined: volatility raises assignment risk";
            break;
    }
    return s;
}

bn::NetworkStructure template_structure(const MarketContext& context, const PsychologicalState& psych,
                                        const VolatilityThresholds& thresholds) {
    namespace v = bn::var;
    check_context(context);
    check_psychological_state(psych);
    auto s = predefined_structure(context.market_regime);
    const auto tercile = wheelhouse::volatility_level(context.volatility, thresholds);
    if (tercile == "High") {
        add_edge(s, v::volatility_level, v::assignment_probability);
    } else if (tercile == "Low") {
        add_edge(s, v::market_regime, v::strike_selection);
    }
    if (psych.stress_level > 0.5) {
        add_edge(s, v::psychological_state, v::risk_tolerance);
        add_edge(s, v::risk_tolerance, v::strike_selection);
    }
    s.reasoning = std::string("template: ") + to_string(context.market_regime) + " regime, " + tercile +
                  " volatility" + (psych.stress_level > 0.5 ? ", stressed" : "");
    return s;
}

GenerationResult generate_with_fallback(const MarketContext& context, const PsychologicalState& psych,
                                        std::span<const FeedbackRecord> feedback, LlmClient& client,
                                        const GenerationConfig& config, std::size_t digest_size) {
    GenerationResult result;
    const auto prompt = construct_prompt(context, psych, feedback, digest_size);
    for (int attempt = 1; attempt <= config.max_retries; ++attempt) {
        result.attempts = attempt;
        try {
            result.structure = parse_llm_response(client.complete(prompt, config));
            result.provenance = Provenance::llm;
            return result;
        } catch (const ParseError& e) {
            const auto prefix = "attempt " + std::to_string(attempt) + ": ";
            result.diagnostics.push_back(prefix + e.what());
            for (const auto& d : e.diagnostics()) result.diagnostics.push_back(prefix + d);
        } catch (const LlmError& e) {
            result.diagnostics.push_back("attempt " + std::to_string(attempt) + ": llm error: " + e.what());
        }
    }

    try {
        auto s = template_structure(context, psych);
        if (bn::validate_structure(s).valid()) {
            result.structure = std::move(s);
            result.provenance = Provenance::template_;
            return result;
        }
        result.diagnostics.emplace_back("template: structure failed validation");
    } catch (const Error& e) {
        result.diagnostics.push_back(std::string("template: ") + e.what());
    }
    result.structure = predefined_structure(context.market_regime);
    result.provenance = Provenance::predefined;
    return result;
}

}  // namespace wheelhouse
