#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wheelhouse/data_io.hpp"
#include "wheelhouse/date.hpp"

namespace wheelhouse::sim {

struct GbmSpec {
    double start_price = 100.0;
    double drift = 0.08;       // annual
    double volatility = 0.25;  // annual
    double volume = 5.0e6;     // mean shares/day
    // Markov regime switching: per-day probability of entering / leaving a
    // stress regime with its own drift and volatility. 0 disables it.
    double stress_entry = 0.0;
    double stress_exit = 0.02;
    double stress_drift = -0.40;
    double stress_volatility = 0.50;
};

// Daily bars on the calendar's trading days in [start, end]. Deterministic in
// (seed, stream).
BarSeries synthetic_bars(const std::string& ticker, Date start, Date end, const GbmSpec& spec, std::uint64_t seed,
                         std::uint64_t stream = 0, const TradingCalendar& calendar = {});

// Bars from a list of closes on consecutive trading days starting at `start`.
// Open = previous close, high/low bracket the pair, constant volume.
BarSeries scripted_bars(const std::string& ticker, Date start, const std::vector<double>& closes,
                        double volume = 1.0e7, const TradingCalendar& calendar = {});

}  // namespace wheelhouse::sim
