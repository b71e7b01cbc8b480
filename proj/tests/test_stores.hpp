#pragma once

// Synthetic trade stores for CPT population tests.

#include <cmath>
#include <string>
#include <vector>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/rng.hpp"

namespace wheelhouse::test_support {

struct AssignmentCell {
    const char* regime;
    const char* strike;
    double high;
};

// The six reference (regime, strike) assignment frequencies.
inline const std::vector<AssignmentCell>& assignment_cells() {
    static const std::vector<AssignmentCell> cells{
        {"Bear", "Conservative", 0.02}, {"Bear", "Moderate", 0.08},    {"Bear", "Aggressive", 0.25},
        {"Neutral", "Conservative", 0.01}, {"Neutral", "Moderate", 0.05}, {"Bull", "Conservative", 0.005},
    };
    return cells;
}

// 1000 closed trades per reference cell, spread over the 200 weekdays before
// `as_of`, with exactly round(1000 * p) High assignments and the rest split
// 30/70 between Medium and Low.
inline TradeStore assignment_store(Date as_of) {
    constexpr int per_cell = 1000;
    std::vector<Date> days;
    for (Date d = as_of - 1; days.size() < 200; d = d - 1)
        if (!d.is_weekend()) days.push_back(d);
    std::vector<TradeRecord> records;
    int serial = 0;
    for (const auto& cell : assignment_cells()) {
        const int high = static_cast<int>(std::lround(cell.high * per_cell));
        const int medium = static_cast<int>(std::lround((per_cell - high) * 0.3));
        for (int i = 0; i < per_cell; ++i) {
            const char* ap = i < high ? "High" : (i < high + medium ? "Medium" : "Low");
            TradeRecord r;
            r.id = "t3-" + std::to_string(serial);
            r.date = days[static_cast<std::size_t>(serial) % days.size()];
            r.ticker = "FIX";
            r.outcome = TradeOutcome::profit;
            r.factors = {{bn::var::market_regime, cell.regime},
                         {bn::var::strike_selection, cell.strike},
                         {bn::var::assignment_probability, ap}};
            records.push_back(std::move(r));
            ++serial;
        }
    }
    return TradeStore(std::move(records));
}

inline bn::NetworkStructure assignment_structure() {
    using namespace bn;
    return {{var::market_regime, var::strike_selection, var::assignment_probability},
            {{var::market_regime, var::assignment_probability}, {var::strike_selection, var::assignment_probability}},
            ""};
}

// Smoothing off, no context matching, full window.
inline PopulationPolicies assignment_policies() {
    PopulationPolicies p;
    p.selection.match_keys.clear();
    p.selection.min_sample = 0;
    p.smoothing.pseudo_count = 0.0;
    return p;
}

// Random closed trades over the core variables. Each factor is dropped with
// probability `missing` to exercise skipping.
inline TradeStore random_store(Rng& rng, std::size_t n, Date start, int span_days, double missing = 0.0) {
    std::vector<TradeRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
        TradeRecord r;
        r.id = "r" + std::to_string(i);
        r.date = start + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span_days)));
        r.ticker = "RND";
        for (const auto& v : bn::core_variables())
            if (uniform01(rng) >= missing) r.factors[v.name] = v.states[uniform_index(rng, v.states.size())];
        records.push_back(std::move(r));
    }
    return TradeStore(std::move(records));
}

}  // namespace wheelhouse::test_support
