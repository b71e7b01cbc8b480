#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "internal.hpp"
#include "wheelhouse/analysis.hpp"
#include "wheelhouse/error.hpp"

namespace wheelhouse::analysis {

using nlohmann::ordered_json;
using detail::num;

std::vector<EdgeImpact> edge_impact_analysis(std::span<const RunRecord> runs) {
    if (runs.size() < 2) throw DomainError("edge impact analysis needs at least two runs");
    std::vector<std::size_t> order(runs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return runs[a].performance > runs[b].performance; });
    const std::size_t half = runs.size() / 2;

    std::vector<EdgeSet> sets;
    EdgeSet all;
    for (const auto& r : runs) {
        sets.push_back(edge_set(r.structure));
        all.insert(sets.back().begin(), sets.back().end());
    }

    std::vector<EdgeImpact> out;
    for (const auto& e : all) {
        EdgeImpact row;
        row.edge = e;
        std::size_t top = 0, bottom = 0;
        for (std::size_t k = 0; k < half; ++k) {
            top += sets[order[k]].contains(e);
            bottom += sets[order[runs.size() - 1 - k]].contains(e);
        }
        row.frequency_high = static_cast<double>(top) / static_cast<double>(half);
        row.frequency_low = static_cast<double>(bottom) / static_cast<double>(half);
        double with = 0.0, without = 0.0;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (sets[i].contains(e)) {
                with += runs[i].performance;
                ++row.present;
            } else {
                without += runs[i].performance;
            }
        }
        if (row.present > 0 && row.present < runs.size())
            row.impact = with / static_cast<double>(row.present) -
                         without / static_cast<double>(runs.size() - row.present);
        out.push_back(std::move(row));
    }
    std::stable_sort(out.begin(), out.end(), [](const EdgeImpact& a, const EdgeImpact& b) {
        if (a.impact != b.impact) return a.impact > b.impact;
        return a.edge < b.edge;
    });
    return out;
}

ordered_json edge_impact_json(const std::vector<EdgeImpact>& rows) {
    ordered_json j = ordered_json::array();
    for (const auto& r : rows)
        j.push_back({{"Edge Type", edge_label(r.edge)},
                     {"Frequency in High-Performers", r.frequency_high},
                     {"Frequency in Low-Performers", r.frequency_low},
                     {"Performance Impact", r.impact},
                     {"runs_with_edge", r.present}});
    return j;
}

std::string edge_impact_csv(const std::vector<EdgeImpact>& rows) {
    std::string out = detail::csv_row(
        {"Edge Type", "Frequency in High-Performers", "Frequency in Low-Performers", "Performance Impact"});
    for (const auto& r : rows)
        out += detail::csv_row({edge_label(r.edge), num(r.frequency_high), num(r.frequency_low), num(r.impact)});
    return out;
}

std::vector<ReliabilityBin> reliability_bins(std::span<const double> sims, std::span<const double> deltas) {
    if (!deltas.empty() && deltas.size() != sims.size())
        throw DomainError("similarities and performance deltas must be aligned");
    for (double s : sims)
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("similarity outside [0, 1]");
    std::vector<ReliabilityBin> bins{
        {"0.9-1.0", "High", 0.9, 1.0, 0, 0.0, {}, "Low"},
        {"0.8-0.9", "Moderate", 0.8, 0.9, 0, 0.0, {}, "Low-Medium"},
        {"0.7-0.8", "Moderate", 0.7, 0.8, 0, 0.0, {}, "Medium"},
        {"0.6-0.7", "Low", 0.6, 0.7, 0, 0.0, {}, "High"},
        {"<0.6", "Very Low", 0.0, 0.6, 0, 0.0, {}, "Very High"},
    };
    std::vector<double> sums(bins.size(), 0.0);
    for (std::size_t i = 0; i < sims.size(); ++i) {
        const double s = sims[i];
        const std::size_t b = s >= 0.9 ? 0 : s >= 0.8 ? 1 : s >= 0.7 ? 2 : s >= 0.6 ? 3 : 4;
        ++bins[b].count;
        if (!deltas.empty()) sums[b] += std::abs(deltas[i]);
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
        bins[b].frequency = sims.empty() ? 0.0 : static_cast<double>(bins[b].count) / static_cast<double>(sims.size());
        if (!deltas.empty() && bins[b].count) bins[b].performance_impact = sums[b] / static_cast<double>(bins[b].count);
    }
    if (bins.back().count == 0) bins.pop_back();
    return bins;
}

ordered_json reliability_json(const std::vector<ReliabilityBin>& bins) {
    ordered_json j = ordered_json::array();
    for (const auto& b : bins)
        j.push_back({{"Similarity Range", b.range + " (" + b.label + ")"},
                     {"Performance Impact", b.performance_impact ? ordered_json(*b.performance_impact) : ordered_json(nullptr)},
                     {"Frequency", b.frequency},
                     {"Deployment Risk", b.risk},
                     {"count", b.count}});
    return j;
}

std::string reliability_csv(const std::vector<ReliabilityBin>& bins) {
    std::string out = detail::csv_row({"Similarity Range", "Performance Impact", "Frequency", "Deployment Risk"});
    for (const auto& b : bins)
        out += detail::csv_row({b.range + " (" + b.label + ")",
                                b.performance_impact ? num(*b.performance_impact) : std::string(), num(b.frequency),
                                b.risk});
    return out;
}

std::vector<SensitivityParameter> default_sensitivity_grid() {
    return {
        {"Position Size Limit", 0.10, {0.05, 0.10, 0.15, 0.20}},
        {"Premium Threshold", 0.025, {0.015, 0.025, 0.04}},
        {"Rolling Criteria", 0.05, {0.03, 0.05, 0.08}},
        {"Temperature", 0.1, {0.05, 0.1, 0.3}},
    };
}

namespace {

void apply(const std::string& name, double value, sim::BacktestConfig& cfg, GenerationConfig& gen) {
    if (name == "Position Size Limit")
        cfg.position_limit = value;
    else if (name == "Premium Threshold")
        cfg.premium_threshold = value;
    else if (name == "Rolling Criteria")
        cfg.roll_trigger = value;
    else if (name == "Temperature")
        gen.temperature = value;
    else
        throw ConfigError("unknown sensitivity parameter '" + name + "'");
}

}  // namespace

SensitivityReport sensitivity_sweep(std::span<const SensitivityParameter> grid, const sim::BacktestConfig& config,
                                    const GenerationConfig& generation, const SensitivityRunner& runner,
                                    unsigned jobs) {
    sim::BacktestConfig base_cfg = config;
    GenerationConfig base_gen = generation;
    for (const auto& p : grid) apply(p.name, p.base, base_cfg, base_gen);

    struct Point {
        std::size_t row;
        double value;
    };
    std::vector<Point> points;
    for (std::size_t r = 0; r < grid.size(); ++r)
        for (double v : grid[r].values) points.push_back({r, v});

    std::vector<double> perf(points.size() + 1);
    detail::parallel_for(points.size() + 1, jobs, [&](std::size_t i) {
        sim::BacktestConfig cfg = base_cfg;
        GenerationConfig gen = base_gen;
        if (i > 0) apply(grid[points[i - 1].row].name, points[i - 1].value, cfg, gen);
        perf[i] = runner(cfg, gen);
    });

    SensitivityReport report;
    report.base_performance = perf[0];
    for (const auto& p : grid) report.rows.push_back({p.name, p.base, {}, {}, {}, 0.0, 0.0});
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& row = report.rows[points[i].row];
        row.values.push_back(points[i].value);
        row.performance.push_back(perf[i + 1]);
        row.deviation.push_back(perf[i + 1] - perf[0]);
    }
    for (auto& row : report.rows) {
        if (row.deviation.empty()) continue;
        row.min_deviation = *std::min_element(row.deviation.begin(), row.deviation.end());
        row.max_deviation = *std::max_element(row.deviation.begin(), row.deviation.end());
    }
    return report;
}

namespace {

std::string range_text(const SensitivityRow& r) {
    if (r.values.empty()) return {};
    const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
    return num(*lo) + "-" + num(*hi);
}

}  // namespace

ordered_json sensitivity_json(const SensitivityReport& r) {
    ordered_json j;
    j["base_performance"] = r.base_performance;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"Parameter", row.parameter},
                        {"Base Value", row.base},
                        {"Range Tested", range_text(row)},
                        {"Performance Impact", {{"min", row.min_deviation}, {"max", row.max_deviation}}},
                        {"values", row.values},
                        {"performance", row.performance}});
    j["table"] = std::move(rows);
    return j;
}

std::string sensitivity_csv(const SensitivityReport& r) {
    std::string out =
        detail::csv_row({"Parameter", "Base Value", "Range Tested", "Performance Impact Min", "Performance Impact Max"});
    for (const auto& row : r.rows)
        out += detail::csv_row(
            {row.parameter, num(row.base), range_text(row), num(row.min_deviation), num(row.max_deviation)});
    return out;
}

}  // namespace wheelhouse::analysis
