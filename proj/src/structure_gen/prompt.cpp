#include <cmath>
#include <cstdio>
#include <sstream>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse {

namespace {

constexpr std::string_view kSystemPreamble = R"(You are an expert in Bayesian Networks and financial trading.
Generate a structured Bayesian Network (DAG) for options trading decisions.

CRITICAL REQUIREMENTS:
1. Output ONLY valid JSON format
2. Include nodes and edges arrays
3. Ensure DAG property (no cycles)
4. Focus on causal relationships, not correlations
5. Include both market and psychological variables

OUTPUT FORMAT:
{
    "nodes": ["node1", "node2", ...],
    "edges": [["parent", "child"], ...],
    "reasoning": "Brief explanation of structure"
}
)";

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string percent(double fraction) { return fixed(fraction * 100.0, 1) + "%"; }

}  // namespace

void check_generation_config(const GenerationConfig& c) {
    if (!(c.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (c.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (c.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
    if (!(c.top_p > 0.0 && c.top_p <= 1.0)) throw ConfigError("top_p must lie in (0, 1]");
}

std::string feedback_digest(std::span<const FeedbackRecord> feedback, std::size_t k) {
    if (k == 0 || feedback.empty()) return {};
    std::ostringstream out;
    out << "RECENT TRADE FEEDBACK (newest first):\n";
    const std::size_t n = std::min(k, feedback.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = feedback[feedback.size() - 1 - i];
        out << "- " << r.date.to_string() << " " << r.trade_id << ": " << r.decision_summary << " -> "
            << to_string(r.outcome);
        if (!r.indicators.empty()) {
            out << "; indicators:";
            bool first = true;
            for (const auto& [name, state] : r.indicators) {
                out << (first ? " " : ", ") << name << "=" << state;
                first = false;
            }
        }
        if (!r.lesson.empty()) out << "; lesson: " << r.lesson;
        out << "\n";
    }
    return out.str();
}

std::string construct_prompt(const MarketContext& c, const PsychologicalState& p,
                             std::span<const FeedbackRecord> feedback, std::size_t digest_size) {
    std::ostringstream out;
    out << kSystemPreamble << "\n";
    out << "Generate a Bayesian Network structure for options trading decision:\n\n";
    out << "MARKET CONTEXT:\n";
    out << "- Ticker: " << c.ticker << "\n";
    out << "- Date: " << c.date.to_string() << "\n";
    out << "- Current Price: $" << fixed(c.current_price, 2) << "\n";
    out << "- Volatility: " << fixed(c.volatility, 2) << "\n";
    out << "- Trend: " << to_string(c.trend) << "\n";
    out << "- VIX: " << fixed(c.vix, 2) << "\n";
    out << "- Market Regime: " << to_string(c.market_regime) << "\n";
    out << "- Average Daily Volume: " << fixed(c.avg_daily_volume, 0) << "\n\n";
    out << "PSYCHOLOGICAL STATE:\n";
    out << "- FOMO Level: " << fixed(p.fomo_level, 2) << "\n";
    out << "- Confidence: " << fixed(p.confidence_level, 2) << "\n";
    out << "- Stress: " << fixed(p.stress_level, 2) << "\n";
    out << "- Tilt Risk: " << fixed(p.tilt_risk, 2) << "\n\n";

    if (const auto digest = feedback_digest(feedback, digest_size); !digest.empty()) out << digest << "\n";

    out << "PREFERRED VARIABLES (use these names and states where relevant):\n";
    for (const auto& v : bn::core_variables()) {
        out << "- " << v.name << ":";
        for (std::size_t i = 0; i < v.states.size(); ++i) out << (i ? ", " : " ") << v.states[i];
        out << "\n";
    }
    out << "\nGenerate nodes for market variables, psychological factors,\n"
           "strategy parameters, and outcomes. Create causal edges based\n"
           "on the current context. Output valid JSON only.\n";
    return out.str();
}

FeedbackRecord record_feedback(const inference::TradeDecision& decision, std::string trade_id, Date date,
                               std::string_view outcome, std::map<std::string, std::string> indicators,
                               std::string lesson) {
    FeedbackRecord r;
    r.outcome = parse_outcome(outcome);
    r.trade_id = std::move(trade_id);
    r.date = date;
    std::ostringstream summary;
    summary << inference::to_string(decision.action);
    if (decision.action != inference::Action::skip) {
        summary << " " << percent(decision.strike_otm_pct) << " OTM";
        if (!decision.strike_selection.empty()) summary << " (" << decision.strike_selection << ")";
        summary << ", size " << percent(decision.position_fraction);
    }
    r.decision_summary = summary.str();
    r.indicators = std::move(indicators);
    if (lesson.empty()) {
        std::ostringstream auto_lesson;
        auto_lesson << to_string(r.outcome) << " after "
                    << (decision.strike_selection.empty() ? std::string("unsized") : decision.strike_selection)
                    << " strike";
        if (!r.indicators.empty()) {
            auto_lesson << " with";
            bool first = true;
            for (const auto& [name, state] : r.indicators) {
                auto_lesson << (first ? " " : ", ") << name << "=" << state;
                first = false;
            }
        }
        lesson = auto_lesson.str();
    }
    r.lesson = std::move(lesson);
    return r;
}

}  // namespace wheelhouse
