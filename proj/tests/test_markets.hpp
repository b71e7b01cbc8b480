#pragma once

// Scripted and synthetic markets shared by the simulator tests.

#include <cstdint>
#include <vector>

#include "wheelhouse/sim/backtest.hpp"
#include "wheelhouse/sim/synthetic.hpp"

namespace wheelhouse::test_support {

using sim::MarketData;

// Zero rate and a 30% volatility floor keep premiums hand-checkable.
inline sim::BacktestConfig base_config(Date start, Date end) {
    sim::BacktestConfig c;
    c.start = start;
    c.end = end;
    c.risk_free_rate = 0.0;
    c.features.volatility_floor = 0.30;
    return c;
}

inline std::vector<Date> dates_of(const sim::BacktestResult& r, TradeAction action) {
    std::vector<Date> out;
    for (const auto& t : r.trade_log)
        if (t.action == action) out.push_back(t.date);
    return out;
}

inline MarketData single(BarSeries s) {
    MarketData m;
    m.emplace(s.ticker, std::move(s));
    return m;
}

// Flat history at `level` for `history` days before the scripted path.
inline std::vector<double> with_history(double level, int history, std::vector<double> path) {
    std::vector<double> out(static_cast<std::size_t>(history), level);
    out.insert(out.end(), path.begin(), path.end());
    return out;
}

inline MarketData gbm_market(Date start, Date end, std::uint64_t seed, int tickers = 1) {
    MarketData m;
    const char* names[] = {"AAA", "BBB", "CCC"};
    for (int i = 0; i < tickers; ++i) {
        sim::GbmSpec spec;
        spec.start_price = 50.0 + 40.0 * i;
        spec.volatility = 0.25 + 0.1 * i;
        spec.stress_entry = 0.004;
        m.emplace(names[i], sim::synthetic_bars(names[i], start, end, spec, seed, static_cast<std::uint64_t>(i)));
    }
    return m;
}

// 2024-01-08 is a Monday; history runs from late 2023.
inline MarketData roll_path_market() {
    std::vector<double> path{100, 97, 95, 94, 93, 90, 89};
    for (int i = 0; i < 13; ++i) path.push_back(89);
    auto closes = with_history(100.0, 45, path);
    // 45 weekdays before 2024-01-08.
    Date start = Date(2024, 1, 8);
    for (int n = 0; n < 45;) {
        start = start - 1;
        if (!start.is_weekend()) ++n;
    }
    return single(sim::scripted_bars("ROLL", start, closes));
}

}  // namespace wheelhouse::test_support
