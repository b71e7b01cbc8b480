#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wheelhouse/bn/structure.hpp"
#include "wheelhouse/context.hpp"
#include "wheelhouse/date.hpp"
#include "wheelhouse/inference.hpp"

namespace wheelhouse {

struct GenerationConfig {
    std::string model_id = "gpt-4-0613";
    double temperature = 0.1;
    int max_tokens = 2000;
    double top_p = 0.9;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    int max_retries = 3;
};

void check_generation_config(const GenerationConfig& config);

struct FeedbackRecord {
    std::string trade_id;
    Date date;
    std::string decision_summary;
    TradeOutcome outcome = TradeOutcome::breakeven;
    std::map<std::string, std::string> indicators;
    std::string lesson;
};

inline constexpr std::size_t kDefaultFeedbackDigest = 10;

// Feedback is taken in append order (oldest first); the digest lists the
// last `k` records newest first. Empty when k == 0 or there is no feedback.
std::string feedback_digest(std::span<const FeedbackRecord> feedback, std::size_t k = kDefaultFeedbackDigest);

std::string construct_prompt(const MarketContext& context, const PsychologicalState& psych,
                             std::span<const FeedbackRecord> feedback = {},
                             std::size_t digest_size = kDefaultFeedbackDigest);

// `outcome` must be Profit, Breakeven or Loss. An empty lesson is replaced by
// a one-line summary of the outcome and its indicators.
FeedbackRecord record_feedback(const inference::TradeDecision& decision, std::string trade_id, Date date,
                               std::string_view outcome, std::map<std::string, std::string> indicators,
                               std::string lesson = {});

// Top-level brace-balanced spans in order of appearance. Braces inside JSON
// string literals do not count.
std::vector<std::string_view> balanced_brace_spans(std::string_view text);

// JSON first, then structured text; the result always validates. Throws
// ParseError with the diagnostics of every strategy tried.
bn::NetworkStructure parse_llm_response(std::string_view response);

// Edge phrasings "X -> Y", "X → Y", "X influences/affects/causes Y" and
// node lists "nodes:", "variables:", "factors:" (one line each). Throws
// ParseError when nothing is found. Does not validate.
bn::NetworkStructure parse_structured_text(std::string_view response);

class LlmClient {
public:
    virtual ~LlmClient() = default;
    // Throws LlmError on transport or service failure.
    virtual std::string complete(const std::string& prompt, const GenerationConfig& config) = 0;
};

// Offline stand-in. Replies are a deterministic function of (prompt, seed,
// temperature) unless a scripted entry exists for (scenario, seed), in which
// case the scripted replies are returned in turn (the last one repeating).
// With variation 0 the reply depends on the prompt alone: the template
// structure for the regime, volatility and stress it states, as plain JSON.
// Larger values perturb edges and the reply format per seed.
class MockLlmClient : public LlmClient {
public:
    using Script = std::map<std::pair<std::string, std::uint64_t>, std::vector<std::string>>;

    explicit MockLlmClient(std::uint64_t seed, double variation = 0.2, std::string scenario = {},
                           Script script = {});

    std::string complete(const std::string& prompt, const GenerationConfig& config) override;

    std::size_t calls() const noexcept { return calls_; }

private:
    std::uint64_t seed_;
    double variation_;
    std::string scenario_;
    Script script_;
    std::size_t calls_ = 0;
};

// Replays a fixed list. A nullopt step throws LlmError; the last step repeats.
class ScriptedLlmClient : public LlmClient {
public:
    explicit ScriptedLlmClient(std::vector<std::optional<std::string>> steps);

    std::string complete(const std::string& prompt, const GenerationConfig& config) override;

    std::size_t calls() const noexcept { return calls_; }
    const std::vector<std::string>& prompts() const noexcept { return prompts_; }

private:
    std::vector<std::optional<std::string>> steps_;
    std::size_t calls_ = 0;
    std::vector<std::string> prompts_;
};

// OpenAI-compatible chat completion endpoint. The key is read from
// WHEELHOUSE_LLM_KEY at construction; a missing key throws ConfigError.
class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(std::string base_url, std::string path = "/v1/chat/completions");

    std::string complete(const std::string& prompt, const GenerationConfig& config) override;

private:
    std::string base_url_;
    std::string path_;
    std::string key_;
};

std::string completion_request_body(const std::string& prompt, const GenerationConfig& config);
// Extracts choices[0].message.content; throws LlmError otherwise.
std::string completion_response_text(std::string_view body);

enum class Provenance { llm, template_, predefined };
const char* to_string(Provenance provenance);

struct GenerationResult {
    bn::NetworkStructure structure;
    Provenance provenance = Provenance::predefined;
    int attempts = 0;
    std::vector<std::string> diagnostics;
};

GenerationResult generate_with_fallback(const MarketContext& context, const PsychologicalState& psych,
                                        std::span<const FeedbackRecord> feedback, LlmClient& client,
                                        const GenerationConfig& config = {},
                                        std::size_t digest_size = kDefaultFeedbackDigest);

// Fixed DAG over the eight core variables.
bn::NetworkStructure predefined_structure(MarketRegime regime);

// Predefined DAG adjusted for the volatility tercile, plus
// Psychological_State -> Risk_Tolerance -> Strike_Selection under stress.
// Throws DomainError on an invalid context.
bn::NetworkStructure template_structure(const MarketContext& context, const PsychologicalState& psych = {},
                                        const VolatilityThresholds& thresholds = {});

}  // namespace wheelhouse
