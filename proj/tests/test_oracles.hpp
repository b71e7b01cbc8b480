#pragma once

// Independent reference computations shared by several test binaries.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wheelhouse/sim/pricing.hpp"

namespace wheelhouse::test_support {

// Discounted risk-neutral expectation of the payoff, integrated with
// composite Simpson over the standard normal on the in-the-money side only.
inline double quadrature_price(double s, double k, double vol, double t, double r, sim::OptionType type) {
    const double drift = (r - 0.5 * vol * vol) * t;
    const double sd = vol * std::sqrt(t);
    const double z_star = (std::log(k / s) - drift) / sd;  // S_T = K
    const double lo = type == sim::OptionType::put ? -12.0 : z_star;
    const double hi = type == sim::OptionType::put ? z_star : 12.0;
    const int n = 20000;
    const double h = (hi - lo) / n;
    auto f = [&](double z) {
        const double st = s * std::exp(drift + sd * z);
        const double payoff = type == sim::OptionType::put ? k - st : st - k;
        return std::max(payoff, 0.0) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return std::exp(-r * t) * sum * h / 3.0;
}


struct CostCase {
    sim::OptionType type;
    int contracts;
    double gross;
    double commission;  // hand arithmetic: max(0.75 n, 1.00)
    double slippage;    // 0.15% of gross for puts, 0.12% for calls
};

inline const std::vector<CostCase>& cost_table() {
    using sim::OptionType;
    static const std::vector<CostCase> table{
        {OptionType::put, 1, 100.0, 1.00, 0.15},     {OptionType::put, 2, 100.0, 1.50, 0.15},
        {OptionType::put, 3, 300.0, 2.25, 0.45},     {OptionType::put, 4, 0.0, 3.00, 0.0},
        {OptionType::put, 5, 1000.0, 3.75, 1.50},    {OptionType::put, 10, 2000.0, 7.50, 3.00},
        {OptionType::put, 20, 50.0, 15.00, 0.075},   {OptionType::put, 100, 10000.0, 75.00, 15.00},
        {OptionType::put, 1, 12.34, 1.00, 0.01851},  {OptionType::put, 7, 777.0, 5.25, 1.1655},
        {OptionType::call, 1, 100.0, 1.00, 0.12},    {OptionType::call, 2, 100.0, 1.50, 0.12},
        {OptionType::call, 3, 250.0, 2.25, 0.30},    {OptionType::call, 4, 400.0, 3.00, 0.48},
        {OptionType::call, 6, 1500.0, 4.50, 1.80},   {OptionType::call, 10, 0.0, 7.50, 0.0},
        {OptionType::call, 13, 1300.0, 9.75, 1.56},  {OptionType::call, 50, 5000.0, 37.50, 6.00},
        {OptionType::call, 1, 0.5, 1.00, 0.0006},    {OptionType::call, 40, 4321.0, 30.00, 5.1852},
    
    };
    return table;
}

// Naive reference implementations: plain loops over std::vector, nothing
// shared with the library.
struct Naive {
    std::vector<double> r;
    double ppy;

    double mean() const {
        double s = 0;
        for (double x : r) s += x;
        return s / r.size();
    }
    double sd() const {
        double m = mean(), s = 0;
        for (double x : r) s += (x - m) * (x - m);
        return std::sqrt(s / (r.size() - 1));
    }
    std::vector<double> curve() const {
        std::vector<double> c{1.0};
        for (double x : r) c.push_back(c.back() * (1 + x));
        return c;
    }
    double total() const { return curve().back() - 1; }
    double annualized() const { return std::pow(1 + total(), ppy / r.size()) - 1; }
    double sharpe() const { return mean() / sd() * std::sqrt(ppy); }
    double sortino() const {
        double s = 0;
        for (double x : r)
            if (x < 0) s += x * x;
        return mean() / std::sqrt(s / r.size()) * std::sqrt(ppy);
    }
    double mdd() const {
        // Every (peak, later trough) pair.
        const auto c = curve();
        double worst = 0;
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j) worst = std::min(worst, c[j] / c[i] - 1);
        return worst;
    }
    double avg_dd() const {
        const auto c = curve();
        std::vector<double> depths;
        std::size_t i = 0;
        while (i < c.size()) {
            double peak = *std::max_element(c.begin(), c.begin() + i + 1);
            if (c[i] < peak) {
                double deepest = 0;
                while (i < c.size() && c[i] < peak) {
                    deepest = std::min(deepest, c[i] / peak - 1);
                    ++i;
                }
                depths.push_back(deepest);
            } else {
                ++i;
            }
        }
        if (depths.empty()) return 0;
        double s = 0;
        for (double d : depths) s += d;
        return s / depths.size();
    }
    double var() const {
        auto s = r;
        std::sort(s.begin(), s.end());
        return s[static_cast<std::size_t>(0.05 * (s.size() - 1))];
    }
    double es() const {
        double v = var(), s = 0;
        int n = 0;
        for (double x : r)
            if (x <= v) {
                s += x;
                ++n;
            }
        return s / n;
    }
    double win() const {
        int w = 0;
        for (double x : r) w += x > 0;
        return static_cast<double>(w) / r.size();
    }
};

}  // namespace wheelhouse::test_support
