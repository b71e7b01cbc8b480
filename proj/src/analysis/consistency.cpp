#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "wheelhouse/analysis.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/rng.hpp"

namespace wheelhouse::analysis {

using nlohmann::ordered_json;

EdgeSet edge_set(const bn::NetworkStructure& s) { return {s.edges.begin(), s.edges.end()}; }

std::string edge_label(const Edge& e) { return e.first + " → " + e.second; }

namespace {

std::size_t intersection_size(const EdgeSet& a, const EdgeSet& b) {
    std::size_t n = 0;
    for (const auto& e : a) n += b.contains(e);
    return n;
}

}  // namespace

double jaccard_similarity(const EdgeSet& a, const EdgeSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    const std::size_t common = intersection_size(a, b);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double overlap_coefficient(const EdgeSet& a, const EdgeSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    return static_cast<double>(intersection_size(a, b)) / static_cast<double>(std::min(a.size(), b.size()));
}

double node_jaccard(const bn::NetworkStructure& a, const bn::NetworkStructure& b) {
    const std::set<std::string> na(a.nodes.begin(), a.nodes.end()), nb(b.nodes.begin(), b.nodes.end());
    if (na.empty() && nb.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& n : na) common += nb.contains(n);
    return static_cast<double>(common) / static_cast<double>(na.size() + nb.size() - common);
}

const char* to_string(Profile p) {
    switch (p) {
        case Profile::confident: return "confident";
        case Profile::stressed: return "stressed";
        case Profile::neutral: return "neutral";
    }
    return "neutral";
}

MarketContext ScenarioSpec::context() const {
    MarketContext c;
    c.ticker = "SCN";
    c.current_price = 100.0;
    c.volatility = volatility_band == "High" ? 0.50 : volatility_band == "Low" ? 0.15 : 0.30;
    c.trend = trend;
    c.vix = 0.5 * (vix_low + vix_high);
    c.market_regime = regime;
    c.avg_daily_volume = volume;
    c.date = Date(2024, 1, 2);
    return c;
}

PsychologicalState ScenarioSpec::psych() const {
    switch (profile) {
        case Profile::confident: return {0.3, 0.8, 0.2, 0.1};
        case Profile::stressed: return {0.6, 0.3, 0.8, 0.6};
        case Profile::neutral: break;
    }
    return {0.3, 0.5, 0.4, 0.2};
}

std::vector<ScenarioSpec> canonical_scenarios() {
    std::vector<ScenarioSpec> out;
    const MarketRegime regimes[] = {MarketRegime::bull, MarketRegime::neutral, MarketRegime::bear};
    const char* bands[] = {"High", "Medium", "Low"};
    const Profile profiles[] = {Profile::confident, Profile::stressed, Profile::neutral};
    for (auto regime : regimes)
        for (const char* band : bands)
            for (auto profile : profiles) {
                const std::string b = band;
                if (regime == MarketRegime::bear && b == "Low" && profile == Profile::confident) continue;
                if (regime == MarketRegime::bull && b == "High" && profile == Profile::stressed) continue;
                ScenarioSpec s;
                s.id = std::string(wheelhouse::to_string(regime)) + "/" + b + "/" + to_string(profile);
                s.regime = regime;
                s.volatility_band = b;
                s.profile = profile;
                s.vix_low = b == "High" ? 30.0 : b == "Medium" ? 18.0 : 10.0;
                s.vix_high = b == "High" ? 45.0 : b == "Medium" ? 30.0 : 18.0;
                s.trend = regime == MarketRegime::bull   ? Trend::up
                          : regime == MarketRegime::bear ? Trend::down
                                                         : Trend::sideways;
                s.volume = 5.0e6;
                out.push_back(std::move(s));
            }
    return out;
}

Summary summarize(std::span<const double> values) {
    Summary s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    s.cv = s.mean != 0.0 ? s.stdev / std::abs(s.mean) : 0.0;
    return s;
}

ConsistencyReport consistency_study(std::span<const ScenarioSpec> scenarios, const ClientFactory& factory,
                                    std::uint64_t seed, int variations, const GenerationConfig& base,
                                    const PerformanceFn& performance, unsigned jobs) {
    if (variations < 1) throw DomainError("consistency study needs at least one variation");
    ConsistencyReport report;
    report.scenarios.resize(scenarios.size());
    const auto per = static_cast<std::size_t>(variations);
    for (std::size_t si = 0; si < scenarios.size(); ++si) {
        report.scenarios[si].id = scenarios[si].id;
        report.scenarios[si].structures.resize(per);
        report.scenarios[si].provenance.resize(per);
        if (performance) report.scenarios[si].performance.resize(per);
    }

    detail::parallel_for(scenarios.size() * per, jobs, [&](std::size_t task) {
        const std::size_t si = task / per;
        const int v = static_cast<int>(task % per);
        Rng rng = make_rng(seed, si * 100000 + static_cast<std::uint64_t>(v));
        const std::uint64_t variation_seed = rng();
        GenerationConfig cfg = base;
        cfg.temperature = kVariationTemperatures[v % 4];
        auto client = factory(scenarios[si], v, variation_seed);
        auto gen = generate_with_fallback(scenarios[si].context(), scenarios[si].psych(), {}, *client, cfg);
        auto& sc = report.scenarios[si];
        if (performance) sc.performance[static_cast<std::size_t>(v)] = performance(scenarios[si], gen.structure);
        sc.provenance[static_cast<std::size_t>(v)] = to_string(gen.provenance);
        sc.structures[static_cast<std::size_t>(v)] = std::move(gen.structure);
    });

    std::vector<double> all_sim, all_edge, all_node, perf_sd;
    for (auto& sc : report.scenarios) {
        std::vector<double> sim, edge, node;
        std::vector<EdgeSet> sets;
        for (const auto& s : sc.structures) sets.push_back(edge_set(s));
        for (std::size_t i = 0; i < per; ++i)
            for (std::size_t j = i + 1; j < per; ++j) {
                sim.push_back(jaccard_similarity(sets[i], sets[j]));
                edge.push_back(overlap_coefficient(sets[i], sets[j]));
                node.push_back(node_jaccard(sc.structures[i], sc.structures[j]));
                report.pair_similarities.push_back(sim.back());
                if (performance) report.pair_performance_deltas.push_back(std::abs(sc.performance[i] - sc.performance[j]));
            }
        sc.similarity = summarize(sim);
        sc.edge_overlap = summarize(edge);
        sc.node_overlap = summarize(node);
        all_sim.insert(all_sim.end(), sim.begin(), sim.end());
        all_edge.insert(all_edge.end(), edge.begin(), edge.end());
        all_node.insert(all_node.end(), node.begin(), node.end());
        if (performance) perf_sd.push_back(summarize(sc.performance).stdev);
    }
    if (all_sim.empty()) {  // one variation: no pairs, trivially consistent
        all_sim = all_edge = all_node = {1.0};
    }
    report.structural_similarity = summarize(all_sim);
    report.edge_overlap = summarize(all_edge);
    report.node_overlap = summarize(all_node);
    if (performance) report.performance_variance = summarize(perf_sd);
    return report;
}

namespace {

ordered_json summary_row(const std::string& metric, const Summary& s) {
    return {{"Metric", metric}, {"Mean", s.mean}, {"Std Dev", s.stdev}, {"Coefficient of Variation", s.cv}};
}

}  // namespace

ordered_json consistency_json(const ConsistencyReport& r) {
    ordered_json j;
    ordered_json table = ordered_json::array();
    table.push_back(summary_row("Structural Similarity", r.structural_similarity));
    table.push_back(summary_row("Edge Overlap", r.edge_overlap));
    table.push_back(summary_row("Node Overlap", r.node_overlap));
    if (r.performance_variance) table.push_back(summary_row("Performance Variance", *r.performance_variance));
    j["table"] = std::move(table);
    ordered_json scenarios = ordered_json::array();
    for (const auto& sc : r.scenarios) {
        ordered_json s;
        s["scenario"] = sc.id;
        s["structures"] = sc.structures.size();
        s["similarity"] = {{"mean", sc.similarity.mean}, {"stdev", sc.similarity.stdev}};
        s["edge_overlap"] = {{"mean", sc.edge_overlap.mean}, {"stdev", sc.edge_overlap.stdev}};
        s["node_overlap"] = {{"mean", sc.node_overlap.mean}, {"stdev", sc.node_overlap.stdev}};
        std::map<std::string, int> prov;
        for (const auto& p : sc.provenance) ++prov[p];
        s["provenance"] = prov;
        if (!sc.performance.empty()) s["performance"] = sc.performance;
        scenarios.push_back(std::move(s));
    }
    j["scenarios"] = std::move(scenarios);
    return j;
}

std::string consistency_csv(const ConsistencyReport& r) {
    using detail::num;
    std::string out = detail::csv_row({"Metric", "Mean", "Std Dev", "Coefficient of Variation"});
    auto row = [&](const char* name, const Summary& s) { out += detail::csv_row({name, num(s.mean), num(s.stdev), num(s.cv)}); };
    row("Structural Similarity", r.structural_similarity);
    row("Edge Overlap", r.edge_overlap);
    row("Node Overlap", r.node_overlap);
    if (r.performance_variance) row("Performance Variance", *r.performance_variance);
    return out;
}

bn::NetworkStructure random_structure(const std::vector<std::string>& nodes, double p, std::uint64_t seed) {
    if (nodes.empty()) throw DomainError("random structure needs at least one node");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
    Rng rng = make_rng(seed);
    std::vector<std::string> order = nodes;
    shuffle(std::span<std::string>(order), rng);
    bn::NetworkStructure s;
    s.nodes = nodes;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (uniform01(rng) < p) s.edges.emplace_back(order[i], order[j]);
    return s;
}

}  // namespace wheelhouse::analysis
