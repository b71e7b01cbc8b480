#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "wheelhouse/analysis.hpp"
#include "wheelhouse/bn/serialization.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/hash.hpp"
#include "wheelhouse/rng.hpp"
#include "wheelhouse/sim/synthetic.hpp"

namespace wheelhouse::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json read_json(const fs::path& path) {
    const auto doc = json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded()) throw DataError(path.string() + ": not valid JSON");
    return doc;
}

std::string pretty(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

fs::path require(const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string("missing required option ") + flag);
    return value;
}

MarketContext context_from_json(const json& j) {
    MarketContext c;
    try {
        c.ticker = j.value("ticker", std::string{});
        c.current_price = j.at("current_price").get<double>();
        c.volatility = j.at("volatility").get<double>();
        c.trend = parse_trend(j.value("trend", std::string("sideways")));
        c.vix = j.value("vix", 20.0);
        c.market_regime = parse_regime(j.value("market_regime", std::string("Neutral")));
        c.avg_daily_volume = j.value("avg_daily_volume", 0.0);
        if (j.contains("date")) c.date = Date::parse(j.at("date").get<std::string>());
    } catch (const json::exception& e) {
        throw DataError(std::string("context: ") + e.what());
    }
    check_context(c);
    return c;
}

PsychologicalState psych_from_json(const json& j) {
    PsychologicalState p;
    try {
        p.fomo_level = j.value("fomo_level", 0.0);
        p.confidence_level = j.value("confidence_level", 0.0);
        p.stress_level = j.value("stress_level", 0.0);
        p.tilt_risk = j.value("tilt_risk", 0.0);
    } catch (const json::exception& e) {
        throw DataError(std::string("psychological state: ") + e.what());
    }
    check_psychological_state(p);
    return p;
}

std::unique_ptr<LlmClient> make_client(const Settings& s, std::uint64_t seed, const std::string& scenario = {}) {
    const std::string provider = s.str("llm.provider", "mock");
    if (provider == "mock") return std::make_unique<MockLlmClient>(seed, s.num("llm.variation", 0.2), scenario);
    if (provider == "live") return std::make_unique<HttpLlmClient>(s.str("llm.base_url", "https://api.openai.com"));
    throw UsageError("llm.provider must be mock or live, got '" + provider + "'");
}

// A Bayesian engine that owns the client it generates structures with.
class OwningEngine : public sim::BayesianEngine {
public:
    OwningEngine(std::unique_ptr<LlmClient> client, sim::BayesianEngineConfig config)
        : BayesianEngine(*client, std::move(config)), client_(std::move(client)) {}

private:
    std::unique_ptr<LlmClient> client_;
};

std::unique_ptr<sim::DecisionEngine> make_engine(const Settings& s, std::uint64_t seed, double risk_aversion) {
    const std::string kind = s.str("engine", "bayesian");
    if (kind == "rule") return std::make_unique<sim::RuleEngine>();
    if (kind != "bayesian") throw UsageError("engine must be rule or bayesian, got '" + kind + "'");
    auto cfg = engine_config_from(s);
    cfg.decision.risk_aversion = risk_aversion;
    return std::make_unique<OwningEngine>(make_client(s, seed), std::move(cfg));
}

fs::path data_dir(const Settings& s) {
    const auto d = s.get("data");
    if (!d) throw UsageError("market data directory required (--data or data = ...)");
    return *d;
}

sim::MarketData load_market(const Settings& s, const TradingCalendar& calendar) {
    const fs::path dir = data_dir(s);
    if (!fs::is_directory(dir)) throw DataError("market data directory not found: " + dir.string());
    const auto wanted = s.list("tickers");
    sim::MarketData data;
    if (!wanted.empty()) {
        for (const auto& t : wanted) {
            const fs::path p = dir / (t + ".csv");
            if (!fs::exists(p)) throw DataError("no bar file for ticker " + t + " in " + dir.string());
            data.emplace(t, load_bars(p, t, calendar));
        }
        return data;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        auto series = load_bars(p, {}, calendar);
        data.emplace(series.ticker, std::move(series));
    }
    if (data.empty()) throw DataError("no .csv bar files in " + dir.string());
    return data;
}

ordered_json metric_json(const metrics::MetricValue& m) {
    ordered_json j;
    j["value"] = m.value ? ordered_json(*m.value) : ordered_json(nullptr);
    if (m.ci) j["ci"] = {m.ci->low, m.ci->high};
    return j;
}

ordered_json metrics_json(const metrics::MetricsReport& r) {
    ordered_json j;
    j["Total Return"] = metric_json(r.total_return);
    j["Annualized Return"] = metric_json(r.annualized_return);
    j["Annualized Volatility"] = metric_json(r.annualized_volatility);
    j["Sharpe Ratio"] = metric_json(r.sharpe);
    j["Sortino Ratio"] = metric_json(r.sortino);
    j["Calmar Ratio"] = metric_json(r.calmar);
    j["Max Drawdown"] = metric_json(r.max_drawdown);
    j["Average Drawdown"] = metric_json(r.average_drawdown);
    j["VaR 95%"] = metric_json(r.var_95);
    j["Expected Shortfall"] = metric_json(r.expected_shortfall);
    j["Win Rate"] = metric_json(r.win_rate);
    j["periods"] = r.periods;
    return j;
}

std::string equity_csv(const sim::BacktestResult& r) {
    std::ostringstream os;
    os << "date,equity,option_liability\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < r.curve.dates.size(); ++i)
        os << r.curve.dates[i].to_string() << ',' << r.curve.values[static_cast<Eigen::Index>(i)] << ','
           << (i < r.option_liability.size() ? r.option_liability[i] : 0.0) << '\n';
    return os.str();
}

ordered_json audit_json(const sim::BacktestResult& r, double replay_error) {
    const auto& a = r.audit;
    ordered_json j;
    j["decisions_audited"] = a.entries.size();
    j["look_ahead_violations"] = a.violations;
    j["max_accounting_error"] = a.max_accounting_error;
    j["replay_max_equity_error"] = replay_error;
    j["collateral_violations"] = a.collateral_violations;
    j["adv_violations"] = a.adv_violations;
    ordered_json dates = ordered_json::array();
    for (Date d : a.retrain_dates) dates.push_back(d.to_string());
    j["retrain_dates"] = std::move(dates);
    j["diagnostics"] = r.diagnostics;
    return j;
}

void write_backtest(Run& run, const sim::BacktestResult& r, const sim::BacktestConfig& cfg,
                    const sim::MarketData& data) {
    run.write("config.json", pretty(sim::backtest_config_json(cfg)));
    run.write("trades.jsonl", trade_log_jsonl(r.trade_log));
    run.write("chains.jsonl", trade_log_jsonl(r.closed_chains));
    std::string fb;
    for (const auto& f : r.feedback) fb += feedback_to_json(f).dump() + "\n";
    run.write("feedback.jsonl", fb);
    run.write("summary.json", pretty(sim::summary_json(r)));
    if (r.curve.dates.size() >= 2)
        run.write("metrics.json", pretty(metrics_json(metrics::compute_metrics(
                                      r.curve, metrics::Periodicity::daily, {cfg.risk_free_rate, true}))));
    run.write("equity.csv", equity_csv(r));
    run.write("audit.json", pretty(audit_json(r, sim::replay_max_equity_error(r, cfg, data))));
}

double annual_return(const sim::BacktestResult& r, double rf) {
    if (r.curve.dates.size() < 2) return 0.0;
    const auto m = metrics::compute_metrics(r.curve, metrics::Periodicity::daily, {rf, true});
    return m.annualized_return.value.value_or(0.0);
}

}  // namespace

std::vector<fs::path> command_inputs(const Invocation& inv) {
    std::vector<fs::path> in;
    if (inv.config) in.push_back(*inv.config);
    for (const auto& f : inv.files) in.push_back(f);
    for (const auto* p : {&inv.context, &inv.psych, &inv.feedback, &inv.structure, &inv.store, &inv.schema,
                          &inv.network, &inv.expert})
        if (!p->empty()) in.push_back(*p);
    if (!inv.input.empty()) in.push_back(inv.input);
    if (const auto h = inv.settings.get("holidays")) in.push_back(*h);
    const bool uses_data = inv.command == "backtest" ||
                           (inv.command == "analyze" && inv.kind != "consistency") ||
                           (inv.command == "analyze" && inv.settings.has("data"));
    if (uses_data && inv.settings.has("data")) in.push_back(*inv.settings.get("data"));
    return in;
}

// ---- ingest ----

int cmd_ingest(const Invocation& inv, Run& run, std::ostream& out) {
    if (inv.files.empty()) throw UsageError("ingest needs at least one file");
    ordered_json report;
    if (inv.kind == "bars") {
        const auto calendar = calendar_from(inv.settings);
        if (!inv.ticker.empty() && inv.files.size() > 1) throw UsageError("--ticker applies to a single file");
        for (const auto& f : inv.files) {
            const auto series = load_bars(f, inv.ticker, calendar);
            run.write("bars/" + series.ticker + ".csv", bars_csv(series));
            ordered_json missing = ordered_json::array();
            for (Date d : series.missing_days) missing.push_back(d.to_string());
            report[series.ticker] = {{"bars", series.bars.size()},
                                     {"first", series.bars.empty() ? "" : series.bars.front().date.to_string()},
                                     {"last", series.bars.empty() ? "" : series.bars.back().date.to_string()},
                                     {"missing_days", std::move(missing)}};
            out << series.ticker << ": " << series.bars.size() << " bars, " << series.missing_days.size()
                << " missing trading days\n";
        }
    } else if (inv.kind == "trades") {
        const StoreSchema schema = inv.schema.empty() ? StoreSchema::defaults() : load_store_schema(inv.schema);
        TradeStoreWriter writer(run.path("store.jsonl"), schema);
        std::size_t seen = 0;
        for (const auto& f : inv.files)
            for (const auto& rec : read_trade_log(f)) {
                writer.append(rec);
                ++seen;
            }
        run.record("store.jsonl");
        report = {{"records_read", seen}, {"records_stored", writer.size()}, {"duplicates", seen - writer.size()}};
        out << "stored " << writer.size() << " of " << seen << " records\n";
    } else {
        throw UsageError("ingest kind must be bars or trades");
    }
    run.write("ingest.json", pretty(report));
    return 0;
}

// ---- structures ----

int cmd_generate(const Invocation& inv, Run& run, std::ostream& out) {
    const auto context = context_from_json(read_json(require(inv.context, "--context")));
    const auto psych = inv.psych.empty() ? PsychologicalState{} : psych_from_json(read_json(inv.psych));
    const auto feedback = inv.feedback.empty() ? std::vector<FeedbackRecord>{} : load_feedback(inv.feedback);
    const auto gen = generation_config_from(inv.settings);
    auto client = make_client(inv.settings, *inv.seed);
    const auto result = generate_with_fallback(context, psych, feedback, *client, gen);

    run.write("prompt.txt", construct_prompt(context, psych, feedback));
    run.write("structure.json", pretty(bn::structure_to_json(result.structure)));
    run.write("generation.json", pretty({{"provenance", to_string(result.provenance)},
                                         {"attempts", result.attempts},
                                         {"diagnostics", result.diagnostics},
                                         {"nodes", result.structure.nodes.size()},
                                         {"edges", result.structure.edges.size()}}));
    out << "structure: " << result.structure.nodes.size() << " nodes, " << result.structure.edges.size()
        << " edges (" << to_string(result.provenance) << ", " << result.attempts << " LLM attempts)\n";
    return 0;
}

int cmd_validate(const Invocation& inv, Run& run, std::ostream& out) {
    if (inv.files.size() != 1) throw UsageError("validate takes exactly one structure file");
    const auto report = bn::validate_structure_json(read_json(inv.files[0]));
    ordered_json violations = ordered_json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"code", bn::to_string(v.code)}, {"message", v.message}, {"path", v.path}});
    run.write("validation.json", pretty({{"valid", report.valid()}, {"violations", std::move(violations)}}));
    if (report.valid()) {
        out << "valid\n";
        return 0;
    }
    for (const auto& v : report.violations) {
        out << bn::to_string(v.code) << ": " << v.message;
        if (!v.path.empty()) {
            out << " [";
            for (std::size_t i = 0; i < v.path.size(); ++i) out << (i ? " -> " : "") << v.path[i];
            out << "]";
        }
        out << "\n";
    }
    return 1;
}

int cmd_populate(const Invocation& inv, Run& run, std::ostream& out) {
    const auto doc = read_json(require(inv.structure, "--structure"));
    const auto structure = bn::structure_from_json(doc);
    const auto context = context_from_json(read_json(require(inv.context, "--context")));
    const StoreSchema schema = inv.schema.empty() ? StoreSchema::defaults() : load_store_schema(inv.schema);
    const auto store = load_trade_store(require(inv.store, "--store"), schema);
    const Date as_of = inv.as_of.empty() ? context.date : Date::parse(inv.as_of);
    const auto result = populate_network(structure, store, context, as_of, population_from(inv.settings),
                                         schema.factors, calendar_from(inv.settings));
    SnapshotProvenance prov{as_of, result.provenance, "file:" + fs::path(inv.structure).filename().string(),
                            result.diagnostics};
    snapshot_network(result.network, prov, run.path("network.json"));
    run.record("network.json");
    out << "populated " << result.network.size() << " nodes from " << result.selected
        << " selected records (" << result.provenance.size() << " contributing) as of " << as_of.to_string() << "\n";
    for (const auto& d : result.diagnostics) out << "  " << d << "\n";
    return 0;
}

int cmd_infer(const Invocation& inv, Run& run, std::ostream& out) {
    const fs::path path = require(inv.network, "--network");
    const auto snap = load_snapshot(path);
    inference::Evidence evidence;
    for (const auto& e : inv.evidence) {
        const auto eq = e.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == e.size())
            throw UsageError("--evidence expects Variable=State, got '" + e + "'");
        evidence[e.substr(0, eq)] = e.substr(eq + 1);
    }
    if (!inv.query.empty()) {
        const auto p = inference::posterior(snap.network, inv.query, evidence);
        const auto j = inference::posterior_to_json(p);
        run.write("posterior.json", pretty(j));
        if (inv.json) {
            out << j.dump(2) << "\n";
        } else {
            out << "P(" << p.variable << " | evidence)\n";
            for (std::size_t i = 0; i < p.states.size(); ++i)
                out << "  " << p.states[i] << ": " << fmt(p.probabilities[static_cast<Eigen::Index>(i)]) << "\n";
        }
        return 0;
    }
    const auto cfg = decision_config_from(inv.settings);
    std::vector<inference::Candidate> candidates;
    for (const auto& c : inv.candidates) {
        const auto colon = c.find(':');
        try {
            inference::Candidate cand;
            cand.strike_otm_pct = std::stod(c.substr(0, colon));
            cand.position_fraction = colon == std::string::npos ? cfg.position_cap : std::stod(c.substr(colon + 1));
            candidates.push_back(cand);
        } catch (const std::exception&) {
            throw UsageError("--candidate expects OTM[:fraction], got '" + c + "'");
        }
    }
    if (candidates.empty())
        candidates = sim::default_candidates(inv.settings.num("put_otm", 0.10), cfg.position_cap);
    const auto id = sha256_hex(read_text_file(path)).substr(0, 16);
    const auto decision = inference::decide_trade(snap.network, evidence, candidates, cfg, id);
    const auto explanation = inference::explain_decision(snap.network, evidence, decision);
    auto j = inference::decision_to_json(decision);
    j["explanation"] = explanation;
    run.write("decision.json", pretty(j));
    if (inv.json)
        out << j.dump(2) << "\n";
    else
        out << explanation << (explanation.ends_with('\n') ? "" : "\n");
    return 0;
}

// ---- simulation ----

int cmd_backtest(const Invocation& inv, Run& run, std::ostream& out) {
    auto cfg = backtest_config_from(inv.settings);
    const auto data = load_market(inv.settings, cfg.calendar);
    const std::uint64_t seed = *inv.seed;
    const Settings& s = inv.settings;
    const double ra = s.num("decision.risk_aversion", 1.0);

    if (inv.walk_forward) {
        sim::WalkForwardConfig wf;
        wf.base = cfg;
        auto need = [&](const char* key) {
            if (!s.has(key)) throw UsageError(std::string("--walk-forward needs ") + key);
            return s.date(key, Date{});
        };
        wf.train_start = need("walk_forward.train_start");
        wf.validate_start = need("walk_forward.validate_start");
        wf.test_start = need("walk_forward.test_start");
        wf.end = need("end");
        wf.risk_aversion_grid = s.numbers("walk_forward.grid", wf.risk_aversion_grid);
        wf.jobs = inv.jobs;
        const auto r = sim::run_walk_forward(wf, data, [&](double a) { return make_engine(s, seed, a); });
        auto full_cfg = cfg;
        full_cfg.start = wf.train_start;
        full_cfg.end = wf.end;
        write_backtest(run, r.full, full_cfg, data);
        run.write("walk_forward.json", pretty(sim::walk_forward_json(r)));
        out << "selected risk aversion " << fmt(r.selected_risk_aversion) << "\n";
        for (const auto& seg : r.segments)
            out << "  " << seg.name << " " << seg.start.to_string() << ".." << seg.end.to_string() << ": return "
                << fmt(seg.total_return) << "\n";
        out << "walk-forward audit: " << (r.audit.passed() ? "passed" : "FAILED") << " ("
            << r.audit.temporal_violations << " temporal violations)\n";
        return r.audit.passed() ? 0 : 1;
    }

    auto engine = make_engine(s, seed, ra);
    const auto r = sim::run_backtest(cfg, data, *engine);
    write_backtest(run, r, cfg, data);
    out << "final equity " << std::fixed << std::setprecision(2) << r.final_equity << " from "
        << r.initial_capital << std::defaultfloat << "\n";
    out << "trades " << r.counts.trades() << " (puts sold " << r.counts.puts_sold << ", rolled "
        << r.counts.puts_rolled << ", assigned " << r.counts.puts_assigned << ")\n";
    out << "look-ahead violations " << r.audit.violations << "\n";
    return 0;
}

int cmd_analyze(const Invocation& inv, Run& run, std::ostream& out) {
    const Settings& s = inv.settings;
    const std::uint64_t seed = *inv.seed;
    const auto engine_cfg = engine_config_from(s);

    if (inv.kind == "consistency") {
        const auto scenarios = analysis::canonical_scenarios();
        const int variations = s.integer("analysis.variations", 20);
        analysis::PerformanceFn perf;
        sim::BacktestConfig cfg;
        sim::MarketData data;
        if (s.has("data")) {
            cfg = backtest_config_from(s);
            data = load_market(s, cfg.calendar);
            perf = [&](const analysis::ScenarioSpec&, const bn::NetworkStructure& st) {
                return analysis::evaluate_structures(std::span(&st, 1), cfg, data, engine_cfg)[0];
            };
        }
        const auto report = analysis::consistency_study(
            scenarios,
            [&](const analysis::ScenarioSpec& sc, int, std::uint64_t vseed) { return make_client(s, vseed, sc.id); },
            seed, variations, generation_config_from(s), perf, inv.jobs);
        run.write("consistency.json", pretty(analysis::consistency_json(report)));
        run.write("consistency.csv", analysis::consistency_csv(report));
        const auto bins = analysis::reliability_bins(report.pair_similarities, report.pair_performance_deltas);
        run.write("reliability.json", pretty(analysis::reliability_json(bins)));
        run.write("reliability.csv", analysis::reliability_csv(bins));
        out << "structural similarity " << fmt(report.structural_similarity.mean) << " (sd "
            << fmt(report.structural_similarity.stdev) << ") over " << scenarios.size() << " scenarios x "
            << variations << " variations\n";
        return 0;
    }

    const auto cfg = backtest_config_from(s);
    const auto data = load_market(s, cfg.calendar);

    if (inv.kind == "ablation") {
        analysis::AblationOptions opt;
        opt.random_candidates = static_cast<std::size_t>(s.integer("analysis.random_candidates", 50));
        opt.edge_probability = s.num("analysis.edge_probability", 0.3);
        opt.generated_candidates = static_cast<std::size_t>(s.integer("analysis.generated_candidates", 1));
        opt.seed = seed;
        opt.llm_factory = [&](std::size_t i) { return make_client(s, seed + i); };
        if (!inv.expert.empty()) opt.expert = bn::structure_from_json(read_json(inv.expert));
        opt.engine = engine_cfg;
        opt.jobs = inv.jobs;
        const auto report = analysis::ablation_run(cfg, data, opt);
        run.write("ablation.json", pretty(analysis::ablation_json(report)));
        run.write("ablation.csv", analysis::ablation_csv(report));
        ordered_json best = ordered_json::object();
        for (const auto& a : report.arms)
            if (!a.best_structure.nodes.empty()) best[a.arm] = bn::structure_to_json(a.best_structure);
        run.write("ablation_structures.json", pretty(best));
        for (const auto& a : report.arms)
            out << a.arm << ": annual return " << (a.annual_return ? fmt(*a.annual_return) : "n/a") << "\n";
        for (const auto& n : report.notices) out << "note: " << n << "\n";
        out << "input parity " << (report.parity_ok ? "verified" : "FAILED") << "\n";
        return report.parity_ok ? 0 : 1;
    }

    if (inv.kind == "impact") {
        const int runs = s.integer("analysis.runs", 20);
        if (runs < 2) throw UsageError("analysis.runs must be at least 2");
        const auto& first = data.begin()->second;
        const auto features = sim::compute_features(first, cfg.start, cfg.features);
        const auto context = sim::to_context(features);
        auto gen = generation_config_from(s);
        std::vector<bn::NetworkStructure> structures;
        for (int i = 0; i < runs; ++i) {
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
            auto client = make_client(s, rng(), context.ticker);
            gen.temperature = analysis::kVariationTemperatures[i % 4];
            structures.push_back(generate_with_fallback(context, {}, {}, *client, gen).structure);
        }
        const auto perf = analysis::evaluate_structures(structures, cfg, data, engine_cfg, inv.jobs);
        std::vector<analysis::RunRecord> records;
        for (std::size_t i = 0; i < structures.size(); ++i) records.push_back({structures[i], perf[i]});
        const auto rows = analysis::edge_impact_analysis(records);
        run.write("edge_impact.json", pretty(analysis::edge_impact_json(rows)));
        run.write("edge_impact.csv", analysis::edge_impact_csv(rows));
        for (std::size_t i = 0; i < std::min<std::size_t>(rows.size(), 5); ++i)
            out << analysis::edge_label(rows[i].edge) << ": impact " << fmt(rows[i].impact) << "\n";
        return 0;
    }

    if (inv.kind == "sensitivity") {
        const auto grid = analysis::default_sensitivity_grid();
        auto runner = [&](const sim::BacktestConfig& c, const GenerationConfig& g) {
            auto e = engine_cfg;
            e.generation = g;
            e.decision.position_cap = c.position_limit;
            OwningEngine engine(make_client(s, seed), e);
            return annual_return(sim::run_backtest(c, data, engine), c.risk_free_rate);
        };
        const auto report = analysis::sensitivity_sweep(grid, cfg, generation_config_from(s), runner, inv.jobs);
        run.write("sensitivity.json", pretty(analysis::sensitivity_json(report)));
        run.write("sensitivity.csv", analysis::sensitivity_csv(report));
        out << "base annual return " << fmt(report.base_performance) << "\n";
        for (const auto& row : report.rows)
            out << row.parameter << ": " << fmt(row.min_deviation) << " .. " << fmt(row.max_deviation) << "\n";
        return 0;
    }
    throw UsageError("analyze kind must be consistency, ablation, impact or sensitivity");
}

// ---- report ----

namespace {

std::string cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return fmt(v.get<double>());
    return v.dump();
}

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

Table table_from_rows(std::string name, const ordered_json& rows) {
    Table t{std::move(name), {}, {}};
    for (const auto& row : rows) {
        if (!row.is_object()) continue;
        for (const auto& [k, _] : row.items())
            if (std::find(t.columns.begin(), t.columns.end(), k) == t.columns.end()) t.columns.push_back(k);
    }
    for (const auto& row : rows) {
        std::vector<std::string> r;
        for (const auto& c : t.columns) r.push_back(row.contains(c) ? cell(row[c]) : "");
        t.rows.push_back(std::move(r));
    }
    return t;
}

Table table_from_object(std::string name, const ordered_json& obj) {
    Table t{std::move(name), {"Field", "Value"}, {}};
    for (const auto& [k, v] : obj.items()) {
        if (v.is_object() && v.contains("value"))
            t.rows.push_back({k, cell(v["value"])});
        else
            t.rows.push_back({k, cell(v)});
    }
    return t;
}

std::string render_text(const Table& t) {
    std::vector<std::size_t> width;
    for (const auto& c : t.columns) width.push_back(c.size());
    for (const auto& r : t.rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    std::ostringstream os;
    os << t.name << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
        os << "\n";
    };
    line(t.columns);
    std::vector<std::string> rule;
    for (auto w : width) rule.push_back(std::string(w, '-'));
    line(rule);
    for (const auto& r : t.rows) line(r);
    return os.str() + "\n";
}

std::string render_csv(const Table& t) {
    auto field = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string o = "\"";
        for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
        return o + "\"";
    };
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + field(cells[i]);
        out += "\n";
    };
    line(t.columns);
    for (const auto& r : t.rows) line(r);
    return out;
}

}  // namespace

int cmd_report(const Invocation& inv, Run& run, std::ostream& out) {
    const fs::path dir = require(inv.input, "--input");
    if (!fs::is_directory(dir)) throw DataError("report input is not a directory: " + dir.string());
    std::vector<Table> tables;
    auto load = [&](const char* file) -> std::optional<ordered_json> {
        const fs::path p = dir / file;
        if (!fs::exists(p)) return std::nullopt;
        const auto doc = ordered_json::parse(read_text_file(p), nullptr, false);
        if (doc.is_discarded()) throw DataError(p.string() + ": not valid JSON");
        return doc;
    };
    if (auto j = load("summary.json")) tables.push_back(table_from_object("summary", *j));
    if (auto j = load("metrics.json")) tables.push_back(table_from_object("metrics", *j));
    if (auto j = load("walk_forward.json"); j && j->contains("segments"))
        tables.push_back(table_from_rows("walk_forward_segments", (*j)["segments"]));
    for (const char* name : {"consistency", "ablation", "sensitivity"})
        if (auto j = load((std::string(name) + ".json").c_str()); j && j->contains("table"))
            tables.push_back(table_from_rows(name, (*j)["table"]));
    for (const char* name : {"edge_impact", "reliability"})
        if (auto j = load((std::string(name) + ".json").c_str())) tables.push_back(table_from_rows(name, *j));
    if (tables.empty()) throw DataError("no result files found in " + dir.string());

    std::string text;
    for (const auto& t : tables) {
        text += render_text(t);
        run.write("report_" + t.name + ".csv", render_csv(t));
    }
    run.write("report.txt", text);
    out << text;
    return 0;
}

// ---- synthetic data ----

int cmd_synth(const Invocation& inv, Run& run, std::ostream& out) {
    const Settings& s = inv.settings;
    auto tickers = s.list("tickers");
    if (tickers.empty()) tickers = {"AAA", "BBB", "CCC"};
    if (!s.has("start") || !s.has("end")) throw UsageError("synth needs start and end");
    const Date start = s.date("start", Date{}), end = s.date("end", Date{});
    const auto calendar = calendar_from(s);
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        sim::GbmSpec spec;
        spec.start_price = 50.0 + 40.0 * static_cast<double>(i % 3);
        spec.volatility = 0.25 + 0.10 * static_cast<double>(i % 3);
        spec.drift = 0.10;
        spec.stress_entry = 0.002;
        const auto series = sim::synthetic_bars(tickers[i], start, end, spec, *inv.seed, i, calendar);
        run.write("data/" + tickers[i] + ".csv", bars_csv(series));
        out << tickers[i] << ": " << series.bars.size() << " bars\n";
    }
    return 0;
}

}  // namespace wheelhouse::cli
