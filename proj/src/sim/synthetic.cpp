#include "wheelhouse/sim/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "wheelhouse/error.hpp"
#include "wheelhouse/rng.hpp"

namespace wheelhouse::sim {

BarSeries synthetic_bars(const std::string& ticker, Date start, Date end, const GbmSpec& spec, std::uint64_t seed,
                         std::uint64_t stream, const TradingCalendar& calendar) {
    if (!(spec.start_price > 0.0) || !(spec.volatility >= 0.0) || !(spec.volume > 0.0))
        throw DomainError("synthetic bars need positive price and volume and non-negative volatility");
    Rng rng = make_rng(seed, stream);
    BarSeries s;
    s.ticker = ticker;
    double close = spec.start_price;
    bool stressed = false;
    constexpr double dt = 1.0 / 252.0;
    for (Date d = start; d <= end; d = d + 1) {
        if (!calendar.is_trading_day(d)) continue;
        const double u = uniform01(rng);
        stressed = stressed ? u >= spec.stress_exit : u < spec.stress_entry;
        const double mu = stressed ? spec.stress_drift : spec.drift;
        const double sigma = stressed ? spec.stress_volatility : spec.volatility;
        const double open = close;
        close = open * std::exp((mu - 0.5 * sigma * sigma) * dt + sigma * std::sqrt(dt) * standard_normal(rng));
        const double wiggle = sigma * std::sqrt(dt) * 0.5 * uniform01(rng);
        Bar b;
        b.date = d;
        b.open = open;
        b.close = close;
        b.adj_close = close;
        b.high = std::max(open, close) * (1.0 + wiggle);
        b.low = std::min(open, close) * (1.0 - wiggle);
        b.volume = std::round(spec.volume * (0.5 + uniform01(rng)));
        s.bars.push_back(b);
    }
    return s;
}

BarSeries scripted_bars(const std::string& ticker, Date start, const std::vector<double>& closes, double volume,
                        const TradingCalendar& calendar) {
    BarSeries s;
    s.ticker = ticker;
    Date d = start;
    double prev = closes.empty() ? 0.0 : closes.front();
    for (double c : closes) {
        if (!(c > 0.0)) throw DomainError("scripted closes must be positive");
        while (!calendar.is_trading_day(d)) d = d + 1;
        s.bars.push_back({d, prev, std::max(prev, c), std::min(prev, c), c, c, volume});
        prev = c;
        d = d + 1;
    }
    return s;
}

}  // namespace wheelhouse::sim
