#include <limits>

#include "internal.hpp"
#include "wheelhouse/analysis.hpp"
#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/hash.hpp"

namespace wheelhouse::analysis {

using nlohmann::ordered_json;

std::string input_hash(const sim::BacktestConfig& config, const sim::MarketData& data) {
    std::string blob = sim::backtest_config_json(config).dump();
    for (const auto& [ticker, series] : data) blob += "\n#" + ticker + "\n" + bars_csv(series);
    return sha256_hex(blob);
}

namespace {

using EngineMaker = std::function<std::unique_ptr<sim::DecisionEngine>()>;

// Owns the client a generated-structure engine borrows.
class OwningEngine : public sim::BayesianEngine {
public:
    OwningEngine(std::unique_ptr<LlmClient> client, sim::BayesianEngineConfig config)
        : BayesianEngine(*client, std::move(config)), client_(std::move(client)) {}

private:
    std::unique_ptr<LlmClient> client_;
};

void fill_metrics(ArmResult& arm, const sim::BacktestResult& r, double rf) {
    arm.annual_return.reset();
    arm.sharpe.reset();
    arm.max_drawdown.reset();
    if (r.curve.dates.size() < 3) return;
    const auto m = metrics::compute_metrics(r.curve, metrics::Periodicity::daily, {rf, true});
    arm.annual_return = m.annualized_return.value;
    arm.sharpe = m.sharpe.value;
    arm.max_drawdown = m.max_drawdown.value;
}

ArmResult run_arm(const std::string& name, const sim::BacktestConfig& config, const sim::MarketData& data,
                  const std::vector<EngineMaker>& makers, const std::vector<bn::NetworkStructure>& structures,
                  unsigned jobs) {
    // Private copies: the hash records exactly what this arm consumed.
    const sim::BacktestConfig cfg = config;
    const sim::MarketData market = data;
    ArmResult arm;
    arm.arm = name;
    arm.candidates = makers.size();
    arm.input_hash = input_hash(cfg, market);

    std::vector<sim::BacktestResult> runs(makers.size());
    detail::parallel_for(makers.size(), jobs, [&](std::size_t i) {
        auto engine = makers[i]();
        runs[i] = sim::run_backtest(cfg, market, *engine);
    });
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        ArmResult probe;
        fill_metrics(probe, runs[i], cfg.risk_free_rate);
        const double score = probe.annual_return.value_or(-std::numeric_limits<double>::infinity());
        if (i == 0 || score > best) {
            best = score;
            arm.best_index = i;
        }
    }
    if (!runs.empty()) {
        fill_metrics(arm, runs[arm.best_index], cfg.risk_free_rate);
        arm.best_run = std::move(runs[arm.best_index]);
        if (arm.best_index < structures.size()) arm.best_structure = structures[arm.best_index];
    }
    return arm;
}

bn::NetworkStructure core_structure_nodes() {
    bn::NetworkStructure s;
    for (const auto& v : bn::core_variables()) s.nodes.push_back(v.name);
    return s;
}

}  // namespace

AblationReport ablation_run(const sim::BacktestConfig& config, const sim::MarketData& data,
                            const AblationOptions& options) {
    AblationReport report;
    const auto& engine_cfg = options.engine;

    if (options.llm_factory && options.generated_candidates > 0) {
        std::vector<EngineMaker> makers;
        for (std::size_t i = 0; i < options.generated_candidates; ++i)
            makers.push_back([&, i]() -> std::unique_ptr<sim::DecisionEngine> {
                return std::make_unique<OwningEngine>(options.llm_factory(i), engine_cfg);
            });
        report.arms.push_back(run_arm("LLM-Generated", config, data, makers, {}, options.jobs));
    } else {
        report.notices.push_back("no LLM client factory; LLM-Generated arm skipped");
    }

    auto fixed_arm = [&](const std::string& name, std::vector<bn::NetworkStructure> structures) {
        std::vector<EngineMaker> makers;
        for (const auto& s : structures)
            makers.push_back([&engine_cfg, s]() -> std::unique_ptr<sim::DecisionEngine> {
                return std::make_unique<sim::BayesianEngine>(s, engine_cfg);
            });
        report.arms.push_back(run_arm(name, config, data, makers, structures, options.jobs));
    };

    if (options.random_candidates > 0) {
        const auto nodes = core_structure_nodes().nodes;
        std::vector<bn::NetworkStructure> randoms;
        for (std::size_t i = 0; i < options.random_candidates; ++i)
            randoms.push_back(random_structure(nodes, options.edge_probability, options.seed + i));
        fixed_arm("Random Structure", std::move(randoms));
    }
    fixed_arm("Fixed Template",
              {options.template_structure.value_or(predefined_structure(MarketRegime::neutral))});
    if (options.expert)
        fixed_arm("Expert", {*options.expert});
    else
        report.notices.push_back("no expert structure file; Expert arm skipped");

    report.parity_ok = !report.arms.empty();
    for (const auto& arm : report.arms) report.parity_ok = report.parity_ok && arm.input_hash == report.arms[0].input_hash;
    return report;
}

std::vector<double> evaluate_structures(std::span<const bn::NetworkStructure> structures,
                                        const sim::BacktestConfig& config, const sim::MarketData& data,
                                        const sim::BayesianEngineConfig& engine, unsigned jobs) {
    std::vector<double> out(structures.size(), 0.0);
    detail::parallel_for(structures.size(), jobs, [&](std::size_t i) {
        sim::BayesianEngine e(structures[i], engine);
        ArmResult probe;
        fill_metrics(probe, sim::run_backtest(config, data, e), config.risk_free_rate);
        out[i] = probe.annual_return.value_or(0.0);
    });
    return out;
}

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

ordered_json ablation_json(const AblationReport& r) {
    ordered_json j;
    ordered_json rows = ordered_json::array();
    for (const auto& a : r.arms)
        rows.push_back({{"Network Type", a.arm},
                        {"Annual Return", opt(a.annual_return)},
                        {"Sharpe Ratio", opt(a.sharpe)},
                        {"Max Drawdown", opt(a.max_drawdown)},
                        {"candidates", a.candidates},
                        {"best_index", a.best_index},
                        {"input_hash", a.input_hash}});
    j["table"] = std::move(rows);
    j["parity_ok"] = r.parity_ok;
    j["notices"] = r.notices;
    return j;
}

std::string ablation_csv(const AblationReport& r) {
    auto cell = [](const std::optional<double>& v) { return v ? detail::num(*v) : std::string(); };
    std::string out = detail::csv_row({"Network Type", "Annual Return", "Sharpe Ratio", "Max Drawdown"});
    for (const auto& a : r.arms)
        out += detail::csv_row({a.arm, cell(a.annual_return), cell(a.sharpe), cell(a.max_drawdown)});
    return out;
}

}  // namespace wheelhouse::analysis
