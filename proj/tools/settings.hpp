#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/sim/backtest.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse::cli {

// Bad command line or config syntax; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat key-value settings. Later sources override earlier ones.
class Settings {
public:
    static const std::vector<std::string>& known_keys();

    // "key = value" lines; blank lines and '#' comments ignored.
    void load_file(const std::filesystem::path& path);
    // "key=value".
    void assign(const std::string& text);
    void set(const std::string& key, std::string value);

    bool has(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    Date date(const std::string& key, Date fallback) const;
    std::vector<std::string> list(const std::string& key) const;
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

TradingCalendar calendar_from(const Settings& s);
sim::BacktestConfig backtest_config_from(const Settings& s);
GenerationConfig generation_config_from(const Settings& s);
PopulationPolicies population_from(const Settings& s);
inference::DecisionConfig decision_config_from(const Settings& s);
sim::BayesianEngineConfig engine_config_from(const Settings& s);

}  // namespace wheelhouse::cli
