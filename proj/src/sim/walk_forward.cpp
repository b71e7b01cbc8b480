#include <algorithm>
#include <thread>

#include "wheelhouse/error.hpp"
#include "wheelhouse/sim/backtest.hpp"

namespace wheelhouse::sim {

using nlohmann::ordered_json;

namespace {

MarketData truncate(const MarketData& data, Date last) {
    MarketData out;
    for (const auto& [t, s] : data) {
        BarSeries copy = s;
        std::erase_if(copy.bars, [&](const Bar& b) { return b.date > last; });
        std::erase_if(copy.missing_days, [&](Date d) { return d > last; });
        out.emplace(t, std::move(copy));
    }
    return out;
}

double equity_at_or_before(const metrics::EquityCurve& curve, Date d, double fallback) {
    double v = fallback;
    for (std::size_t i = 0; i < curve.dates.size() && curve.dates[i] <= d; ++i)
        v = curve.values[static_cast<Eigen::Index>(i)];
    return v;
}

SegmentSummary segment(const BacktestResult& r, std::string name, Date start, Date end) {
    SegmentSummary s;
    s.name = std::move(name);
    s.start = start;
    s.end = end;
    s.start_equity = equity_at_or_before(r.curve, start - 1, r.initial_capital);
    s.end_equity = equity_at_or_before(r.curve, end, s.start_equity);
    s.total_return = s.end_equity / s.start_equity - 1.0;

    metrics::EquityCurve part;
    part.dates.push_back(start - 1);
    std::vector<double> values{s.start_equity};
    for (std::size_t i = 0; i < r.curve.dates.size(); ++i) {
        const Date d = r.curve.dates[i];
        if (d < start || d > end) continue;
        part.dates.push_back(d);
        values.push_back(r.curve.values[static_cast<Eigen::Index>(i)]);
    }
    part.values = Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (values.size() > 2)
        s.sharpe = metrics::compute_metrics(part, metrics::Periodicity::daily, {0.0, true}).sharpe.value;
    return s;
}

bool retrain_schedule_ok(const BacktestResult& r, Date start, int months) {
    const auto& dates = r.curve.dates;
    if (dates.empty()) return r.audit.retrain_dates.empty();
    std::vector<Date> expected{dates.front()};
    int k = 1;
    for (Date d : dates) {
        if (d >= start.add_months(months * k)) {
            expected.push_back(d);
            while (d >= start.add_months(months * k)) ++k;
        }
    }
    for (std::size_t i = 1; i < expected.size(); ++i)
        if (expected[i] - expected[i - 1] > months * 31 + 7) return false;
    return expected == r.audit.retrain_dates;
}

}  // namespace

WalkForwardResult run_walk_forward(const WalkForwardConfig& config, const MarketData& data,
                                   const EngineFactory& factory) {
    if (!(config.train_start < config.validate_start && config.validate_start < config.test_start &&
          config.test_start <= config.end))
        throw ConfigError("walk-forward boundaries must satisfy train < validate < test <= end");
    if (config.risk_aversion_grid.empty()) throw ConfigError("risk-aversion grid is empty");

    WalkForwardResult out;
    out.audit.boundaries_ordered = true;
    const Date validate_end = config.test_start - 1;
    const MarketData visible = truncate(data, validate_end);
    out.audit.validation_runs_bounded = std::all_of(visible.begin(), visible.end(), [&](const auto& kv) {
        return kv.second.bars.empty() || kv.second.bars.back().date <= validate_end;
    });

    Date visible_end = config.train_start;
    for (const auto& [t, series] : visible)
        if (!series.bars.empty()) visible_end = std::max(visible_end, series.bars.back().date);

    const auto& grid = config.risk_aversion_grid;
    std::vector<double> scores(grid.size());
    std::vector<std::size_t> violations(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    auto run_one = [&](std::size_t i) {
        try {
            BacktestConfig cfg = config.base;
            cfg.start = config.train_start;
            cfg.end = visible_end;
            auto engine = factory(grid[i]);
            const auto r = run_backtest(cfg, visible, *engine);
            const auto seg = segment(r, "validate", config.validate_start, validate_end);
            scores[i] = seg.total_return;
            violations[i] = r.audit.violations;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const unsigned jobs = std::max(1u, config.jobs);
    for (std::size_t base = 0; base < grid.size(); base += jobs) {
        std::vector<std::jthread> workers;
        for (std::size_t i = base; i < std::min(grid.size(), base + jobs); ++i) workers.emplace_back(run_one, i);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.validation_scores.emplace_back(grid[i], scores[i]);
        out.audit.temporal_violations += violations[i];
        if (scores[i] > scores[best]) best = i;
    }
    out.selected_risk_aversion = grid[best];

    BacktestConfig cfg = config.base;
    cfg.start = config.train_start;
    cfg.end = config.end;
    auto engine = factory(out.selected_risk_aversion);
    out.full = run_backtest(cfg, data, *engine);
    out.audit.temporal_violations += out.full.audit.violations;
    out.audit.retrain_dates = out.full.audit.retrain_dates;
    out.audit.retrain_schedule_ok = retrain_schedule_ok(out.full, cfg.start, cfg.retrain_months);

    out.segments.push_back(segment(out.full, "train", config.train_start, config.validate_start - 1));
    out.segments.push_back(segment(out.full, "validate", config.validate_start, validate_end));
    out.segments.push_back(segment(out.full, "test", config.test_start, config.end));
    return out;
}

ordered_json walk_forward_json(const WalkForwardResult& r) {
    ordered_json j;
    j["selected_risk_aversion"] = r.selected_risk_aversion;
    ordered_json grid = ordered_json::array();
    for (const auto& [ra, score] : r.validation_scores)
        grid.push_back({{"risk_aversion", ra}, {"validation_return", score}});
    j["validation"] = std::move(grid);
    ordered_json segs = ordered_json::array();
    for (const auto& s : r.segments)
        segs.push_back({{"segment", s.name},
                        {"start", s.start.to_string()},
                        {"end", s.end.to_string()},
                        {"start_equity", s.start_equity},
                        {"end_equity", s.end_equity},
                        {"total_return", s.total_return},
                        {"sharpe", s.sharpe ? ordered_json(*s.sharpe) : ordered_json(nullptr)}});
    j["segments"] = std::move(segs);
    ordered_json retrains = ordered_json::array();
    for (Date d : r.audit.retrain_dates) retrains.push_back(d.to_string());
    j["audit"] = {{"temporal_violations", r.audit.temporal_violations},
                  {"boundaries_ordered", r.audit.boundaries_ordered},
                  {"validation_runs_bounded", r.audit.validation_runs_bounded},
                  {"retrain_schedule_ok", r.audit.retrain_schedule_ok},
                  {"retrain_dates", std::move(retrains)},
                  {"passed", r.audit.passed()}};
    j["summary"] = summary_json(r.full);
    return j;
}

}  // namespace wheelhouse::sim
