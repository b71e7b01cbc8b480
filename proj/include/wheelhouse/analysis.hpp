#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wheelhouse/bn/structure.hpp"
#include "wheelhouse/context.hpp"
#include "wheelhouse/sim/backtest.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse::analysis {

using Edge = std::pair<std::string, std::string>;
using EdgeSet = std::set<Edge>;

EdgeSet edge_set(const bn::NetworkStructure& structure);
std::string edge_label(const Edge& edge);  // "A → B"

// |A ∩ B| / |A ∪ B|; two empty sets give 1.
double jaccard_similarity(const EdgeSet& a, const EdgeSet& b);
// |A ∩ B| / min(|A|, |B|); two empty sets give 1, one empty set gives 0.
double overlap_coefficient(const EdgeSet& a, const EdgeSet& b);
double node_jaccard(const bn::NetworkStructure& a, const bn::NetworkStructure& b);

// ---- scenarios ----

enum class Profile { confident, stressed, neutral };
const char* to_string(Profile profile);

struct ScenarioSpec {
    std::string id;
    MarketRegime regime = MarketRegime::neutral;
    std::string volatility_band;  // High / Medium / Low
    Profile profile = Profile::neutral;
    double vix_low = 0.0;
    double vix_high = 0.0;
    Trend trend = Trend::sideways;
    double volume = 0.0;

    MarketContext context() const;
    PsychologicalState psych() const;
};

// 3 regimes x 3 volatility bands x 3 profiles minus Bear/Low/confident and
// Bull/High/stressed: 25 scenarios.
std::vector<ScenarioSpec> canonical_scenarios();

// ---- consistency ----

struct Summary {
    double mean = 0.0;
    double stdev = 0.0;
    double cv = 0.0;  // stdev / mean, 0 when the mean is 0
};

Summary summarize(std::span<const double> values);

struct ScenarioConsistency {
    std::string id;
    std::vector<bn::NetworkStructure> structures;
    std::vector<std::string> provenance;
    Summary similarity;
    Summary edge_overlap;
    Summary node_overlap;
    std::vector<double> performance;  // per structure when a performance function is given
};

struct ConsistencyReport {
    std::vector<ScenarioConsistency> scenarios;
    Summary structural_similarity;  // pooled over every within-scenario pair
    Summary edge_overlap;
    Summary node_overlap;
    // Per-scenario stdev of performance, summarized across scenarios.
    std::optional<Summary> performance_variance;
    // Every within-scenario pair, aligned: similarity and |performance delta|.
    std::vector<double> pair_similarities;
    std::vector<double> pair_performance_deltas;
};

// Client for one variation of one scenario. Variation v uses seed
// (seed, scenario index, v) and temperature kVariationTemperatures[v % 4].
using ClientFactory =
    std::function<std::unique_ptr<LlmClient>(const ScenarioSpec& scenario, int variation, std::uint64_t seed)>;
using PerformanceFn = std::function<double(const ScenarioSpec& scenario, const bn::NetworkStructure& structure)>;

inline constexpr double kVariationTemperatures[4] = {0.05, 0.1, 0.2, 0.3};

ConsistencyReport consistency_study(std::span<const ScenarioSpec> scenarios, const ClientFactory& factory,
                                    std::uint64_t seed, int variations = 20, const GenerationConfig& base = {},
                                    const PerformanceFn& performance = {}, unsigned jobs = 1);

nlohmann::ordered_json consistency_json(const ConsistencyReport& report);
std::string consistency_csv(const ConsistencyReport& report);

// ---- random structures ----

// Uniformly random node order, then each forward pair becomes an edge with
// probability edge_probability. Throws DomainError for an empty node set or
// a probability outside [0, 1].
bn::NetworkStructure random_structure(const std::vector<std::string>& nodes, double edge_probability,
                                      std::uint64_t seed);

// ---- ablation ----

struct ArmResult {
    std::string arm;
    std::optional<double> annual_return;
    std::optional<double> sharpe;
    std::optional<double> max_drawdown;
    std::size_t candidates = 0;
    std::size_t best_index = 0;
    std::string input_hash;  // SHA-256 of the config and market data the arm consumed
    bn::NetworkStructure best_structure;
    sim::BacktestResult best_run;
};

struct AblationOptions {
    std::size_t random_candidates = 50;
    double edge_probability = 0.3;
    std::uint64_t seed = 0;
    std::size_t generated_candidates = 1;
    // One client per generated candidate; required for the generated arm.
    std::function<std::unique_ptr<LlmClient>(std::size_t candidate)> llm_factory;
    std::optional<bn::NetworkStructure> expert;
    std::optional<bn::NetworkStructure> template_structure;  // default: predefined Neutral structure
    sim::BayesianEngineConfig engine;
    unsigned jobs = 1;
};

struct AblationReport {
    std::vector<ArmResult> arms;
    bool parity_ok = false;
    std::vector<std::string> notices;
};

// Hash over the canonical JSON of the config and every bar of `data`.
std::string input_hash(const sim::BacktestConfig& config, const sim::MarketData& data);

// Arms "LLM-Generated", "Random Structure", "Fixed Template" and, when given,
// "Expert". Multi-candidate arms keep their best annualized return.
AblationReport ablation_run(const sim::BacktestConfig& config, const sim::MarketData& data,
                            const AblationOptions& options);

nlohmann::ordered_json ablation_json(const AblationReport& report);

// Annualized return of each structure pinned in a BayesianEngine over the
// same config and data; 0 for runs too short to annualize.
std::vector<double> evaluate_structures(std::span<const bn::NetworkStructure> structures,
                                        const sim::BacktestConfig& config, const sim::MarketData& data,
                                        const sim::BayesianEngineConfig& engine, unsigned jobs = 1);
std::string ablation_csv(const AblationReport& report);

// ---- edge impact ----

struct RunRecord {
    bn::NetworkStructure structure;
    double performance = 0.0;
};

struct EdgeImpact {
    Edge edge;
    double frequency_high = 0.0;
    double frequency_low = 0.0;
    // Mean performance with the edge minus without; 0 when every run or no
    // run has it.
    double impact = 0.0;
    std::size_t present = 0;
};

// Runs sorted by performance (ties keep input order); the top floor(n/2)
// are high performers and the bottom floor(n/2) low performers. Rows sorted
// by impact, then edge. Throws DomainError for fewer than 2 runs.
std::vector<EdgeImpact> edge_impact_analysis(std::span<const RunRecord> runs);

nlohmann::ordered_json edge_impact_json(const std::vector<EdgeImpact>& rows);
std::string edge_impact_csv(const std::vector<EdgeImpact>& rows);

// ---- reliability ----

struct ReliabilityBin {
    std::string range;
    std::string label;
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;
    double frequency = 0.0;
    std::optional<double> performance_impact;  // mean |delta|
    std::string risk;
};

// Bins [0.9, 1.0], [0.8, 0.9), [0.7, 0.8), [0.6, 0.7), plus a "< 0.6" row
// only when some value falls there. Throws DomainError on misaligned input
// or similarities outside [0, 1].
std::vector<ReliabilityBin> reliability_bins(std::span<const double> similarities, std::span<const double> deltas);

nlohmann::ordered_json reliability_json(const std::vector<ReliabilityBin>& bins);
std::string reliability_csv(const std::vector<ReliabilityBin>& bins);

// ---- sensitivity ----

struct SensitivityParameter {
    std::string name;  // Position Size Limit, Premium Threshold, Rolling Criteria, Temperature
    double base = 0.0;
    std::vector<double> values;
};

std::vector<SensitivityParameter> default_sensitivity_grid();

struct SensitivityRow {
    std::string parameter;
    double base = 0.0;
    std::vector<double> values;
    std::vector<double> performance;
    std::vector<double> deviation;  // performance - base performance
    double min_deviation = 0.0;
    double max_deviation = 0.0;
};

struct SensitivityReport {
    double base_performance = 0.0;
    std::vector<SensitivityRow> rows;
};

using SensitivityRunner = std::function<double(const sim::BacktestConfig&, const GenerationConfig&)>;

// Base run with every parameter at its base value, then one run per grid
// point with only that parameter changed. Throws ConfigError for an
// unknown parameter name.
SensitivityReport sensitivity_sweep(std::span<const SensitivityParameter> grid, const sim::BacktestConfig& config,
                                    const GenerationConfig& generation, const SensitivityRunner& runner,
                                    unsigned jobs = 1);

nlohmann::ordered_json sensitivity_json(const SensitivityReport& report);
std::string sensitivity_csv(const SensitivityReport& report);

}  // namespace wheelhouse::analysis
