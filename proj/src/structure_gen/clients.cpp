#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wheelhouse/bn/serialization.hpp"
#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/hash.hpp"
#include "wheelhouse/rng.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse {

namespace {

namespace v = bn::var;

std::string field_after(const std::string& prompt, std::string_view label) {
    const auto pos = prompt.find(label);
    if (pos == std::string::npos) return {};
    const auto start = pos + label.size();
    const auto end = prompt.find('\n', start);
    return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

double number_after(const std::string& prompt, std::string_view label, double fallback) {
    const auto text = field_after(prompt, label);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    return end == text.c_str() ? fallback : v;
}

// Every mock edge points forward in this order, so any subset is acyclic.
const std::vector<std::string>& causal_order() {
    static const std::vector<std::string> order{v::market_regime,      v::volatility_level,  v::stock_fundamentals,
                                                v::technical_position, v::psychological_state, v::risk_tolerance,
                                                v::strike_selection,   v::premium_rate,      v::assignment_probability,
                                                v::trade_outcome};
    return order;
}

std::string render(const bn::NetworkStructure& s, Rng& rng) {
    const auto json = bn::structure_to_json(s).dump();
    switch (uniform_index(rng, 3)) {
        case 0: return json;
        case 1: return "Here is the network for this context:\n```json\n" + json + "\n```\nLet me know.";
        default: {
            std::ostringstream out;
            out << "Nodes: ";
            for (std::size_t i = 0; i < s.nodes.size(); ++i) out << (i ? ", " : "") << s.nodes[i];
            out << "\n";
            for (const auto& [from, to] : s.edges) out << from << " -> " << to << "\n";
            return out.str();
        }
    }
}

}  // namespace

MockLlmClient::MockLlmClient(std::uint64_t seed, double variation, std::string scenario, Script script)
    : seed_(seed), variation_(variation), scenario_(std::move(scenario)), script_(std::move(script)) {}

std::string MockLlmClient::complete(const std::string& prompt, const GenerationConfig& config) {
    const auto call = calls_++;
    if (auto it = script_.find({scenario_, seed_}); it != script_.end() && !it->second.empty())
        return it->second[std::min(call, it->second.size() - 1)];

    MarketContext ctx;
    ctx.current_price = 1.0;
    try {
        ctx.market_regime = parse_regime(field_after(prompt, "Market Regime: "));
    } catch (const DomainError&) {
        ctx.market_regime = MarketRegime::neutral;
    }
    ctx.volatility = std::max(0.0, number_after(prompt, "Volatility: ", 0.3));
    PsychologicalState psych;
    psych.stress_level = std::clamp(number_after(prompt, "Stress: ", 0.0), 0.0, 1.0);
    auto s = template_structure(ctx, psych);
    if (variation_ <= 0.0) return bn::structure_to_json(s).dump();

    const auto digest = sha256_hex(prompt);
    const std::uint64_t prompt_key = std::stoull(digest.substr(0, 16), nullptr, 16);
    auto rng = make_rng(seed_ ^ prompt_key, std::bit_cast<std::uint64_t>(config.temperature));

    const std::set<bn::Edge> anchored{{v::volatility_level, v::strike_selection}, {v::market_regime, v::assignment_probability}};
    const double flip = std::min(1.0, variation_ * (1.0 + config.temperature));
    const auto& order = causal_order();
    std::vector<bn::Edge> edges;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            bn::Edge e{order[i], order[j]};
            bool present = std::find(s.edges.begin(), s.edges.end(), e) != s.edges.end();
            // Sparse pool: only toggle absent edges with a reduced rate.
            const double rate = present ? flip : flip * 0.15;
            if (!anchored.count(e) && uniform01(rng) < rate) present = !present;
            if (present) edges.push_back(std::move(e));
        }
    bn::NetworkStructure out;
    out.nodes = s.nodes;
    for (const auto& [from, to] : edges)
        for (const auto& n : {from, to})
            if (std::find(out.nodes.begin(), out.nodes.end(), n) == out.nodes.end()) out.nodes.push_back(n);
    out.edges = std::move(edges);
    out.reasoning = "mock: " + s.reasoning;
    return render(out, rng);
}

ScriptedLlmClient::ScriptedLlmClient(std::vector<std::optional<std::string>> steps) : steps_(std::move(steps)) {}

std::string ScriptedLlmClient::complete(const std::string& prompt, const GenerationConfig&) {
    const auto call = calls_++;
    prompts_.push_back(prompt);
    if (steps_.empty()) throw LlmError("scripted client has no replies");
    const auto& step = steps_[std::min(call, steps_.size() - 1)];
    if (!step) throw LlmError("scripted transient failure on call " + std::to_string(call + 1));
    return *step;
}

std::string completion_request_body(const std::string& prompt, const GenerationConfig& config) {
    nlohmann::ordered_json body;
    body["model"] = config.model_id;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = config.temperature;
    body["max_tokens"] = config.max_tokens;
    body["top_p"] = config.top_p;
    body["frequency_penalty"] = config.frequency_penalty;
    body["presence_penalty"] = config.presence_penalty;
    return body.dump();
}

std::string completion_response_text(std::string_view body) {
    const auto doc = nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
    if (doc.is_discarded()) throw LlmError("completion response is not JSON");
    const auto ptr = nlohmann::json::json_pointer("/choices/0/message/content");
    if (!doc.contains(ptr) || !doc[ptr].is_string()) throw LlmError("completion response lacks message content");
    return doc[ptr].get<std::string>();
}

}  // namespace wheelhouse
