#include "settings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "wheelhouse/error.hpp"

namespace wheelhouse::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const std::vector<std::string>& Settings::known_keys() {
    static const std::vector<std::string> keys{
        "data", "tickers", "start", "end", "initial_capital", "put_otm", "roll_trigger", "position_limit",
        "adv_cap", "cycle", "rolling", "retrain_months", "risk_free_rate", "premium_threshold", "breakeven_band",
        "seed", "holidays", "engine",
        "costs.enabled", "costs.commission_per_contract", "costs.exchange_fee_per_contract", "costs.min_commission",
        "costs.slippage_put", "costs.slippage_call",
        "features.volatility_window", "features.volatility_floor", "features.regime_window",
        "features.regime_threshold", "features.trend_window", "features.trend_threshold", "features.rsi_window",
        "features.rsi_oversold", "features.rsi_overbought", "features.fundamentals_window",
        "features.fundamentals_threshold", "features.adv_window", "features.range_window",
        "features.volatility_low_below", "features.volatility_high_at",
        "llm.provider", "llm.base_url", "llm.model", "llm.temperature", "llm.max_tokens", "llm.top_p",
        "llm.max_retries", "llm.variation",
        "decision.risk_aversion", "decision.conservative_min_otm", "decision.aggressive_max_otm",
        "population.window_days", "population.min_sample", "population.pseudo_count",
        "walk_forward.train_start", "walk_forward.validate_start", "walk_forward.test_start", "walk_forward.grid",
        "analysis.variations", "analysis.random_candidates", "analysis.edge_probability",
        "analysis.generated_candidates", "analysis.runs"};
    return keys;
}

void Settings::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path.string());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw UsageError(path.string() + ":" + std::to_string(n) + ": expected key = value");
        set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
}

void Settings::assign(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value, got '" + text + "'");
    set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
}

void Settings::set(const std::string& key, std::string value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UsageError("unknown setting '" + key + "'");
    values_[key] = std::move(value);
}

std::optional<std::string> Settings::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Settings::str(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        throw UsageError("setting '" + key + "' is not a number: '" + text + "'");
    return v;
}

}  // namespace

double Settings::num(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_number<double>(key, *v) : fallback;
}

int Settings::integer(const std::string& key, int fallback) const {
    const auto v = get(key);
    return v ? parse_number<int>(key, *v) : fallback;
}

std::uint64_t Settings::u64(const std::string& key, std::uint64_t fallback) const {
    const auto v = get(key);
    return v ? parse_number<std::uint64_t>(key, *v) : fallback;
}

bool Settings::flag(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw UsageError("setting '" + key + "' is not a boolean: '" + *v + "'");
}

Date Settings::date(const std::string& key, Date fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        return Date::parse(*v);
    } catch (const Error&) {
        throw UsageError("setting '" + key + "' is not an ISO date: '" + *v + "'");
    }
}

std::vector<std::string> Settings::list(const std::string& key) const {
    std::vector<std::string> out;
    const auto v = get(key);
    if (!v) return out;
    std::size_t pos = 0;
    while (pos <= v->size()) {
        const auto comma = v->find(',', pos);
        const std::string item = trim(v->substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> Settings::numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : list(key)) out.push_back(parse_number<double>(key, item));
    return out;
}

TradingCalendar calendar_from(const Settings& s) {
    const auto file = s.get("holidays");
    return file ? TradingCalendar::from_holiday_file(*file) : TradingCalendar{};
}

sim::BacktestConfig backtest_config_from(const Settings& s) {
    sim::BacktestConfig c;
    c.tickers = s.list("tickers");
    c.start = s.date("start", c.start);
    c.end = s.date("end", c.end);
    c.initial_capital = s.num("initial_capital", c.initial_capital);
    c.put_otm = s.num("put_otm", c.put_otm);
    c.roll_trigger = s.num("roll_trigger", c.roll_trigger);
    c.position_limit = s.num("position_limit", c.position_limit);
    c.adv_cap = s.num("adv_cap", c.adv_cap);
    if (const auto cycle = s.get("cycle")) c.cycle = sim::parse_expiry_cycle(*cycle);
    c.rolling = s.flag("rolling", c.rolling);
    c.retrain_months = s.integer("retrain_months", c.retrain_months);
    c.risk_free_rate = s.num("risk_free_rate", c.risk_free_rate);
    c.premium_threshold = s.num("premium_threshold", c.premium_threshold);
    c.breakeven_band = s.num("breakeven_band", c.breakeven_band);
    c.seed = s.u64("seed", c.seed);

    auto& k = c.costs;
    k.enabled = s.flag("costs.enabled", k.enabled);
    k.commission_per_contract = s.num("costs.commission_per_contract", k.commission_per_contract);
    k.exchange_fee_per_contract = s.num("costs.exchange_fee_per_contract", k.exchange_fee_per_contract);
    k.min_commission = s.num("costs.min_commission", k.min_commission);
    k.slippage_put = s.num("costs.slippage_put", k.slippage_put);
    k.slippage_call = s.num("costs.slippage_call", k.slippage_call);

    auto& f = c.features;
    f.volatility_window = s.integer("features.volatility_window", f.volatility_window);
    f.volatility_floor = s.num("features.volatility_floor", f.volatility_floor);
    f.regime_window = s.integer("features.regime_window", f.regime_window);
    f.regime_threshold = s.num("features.regime_threshold", f.regime_threshold);
    f.trend_window = s.integer("features.trend_window", f.trend_window);
    f.trend_threshold = s.num("features.trend_threshold", f.trend_threshold);
    f.rsi_window = s.integer("features.rsi_window", f.rsi_window);
    f.rsi_oversold = s.num("features.rsi_oversold", f.rsi_oversold);
    f.rsi_overbought = s.num("features.rsi_overbought", f.rsi_overbought);
    f.fundamentals_window = s.integer("features.fundamentals_window", f.fundamentals_window);
    f.fundamentals_threshold = s.num("features.fundamentals_threshold", f.fundamentals_threshold);
    f.adv_window = s.integer("features.adv_window", f.adv_window);
    f.range_window = s.integer("features.range_window", f.range_window);
    f.volatility.low_below = s.num("features.volatility_low_below", f.volatility.low_below);
    f.volatility.high_at = s.num("features.volatility_high_at", f.volatility.high_at);

    c.calendar = calendar_from(s);
    return c;
}

GenerationConfig generation_config_from(const Settings& s) {
    GenerationConfig g;
    g.model_id = s.str("llm.model", g.model_id);
    g.temperature = s.num("llm.temperature", g.temperature);
    g.max_tokens = s.integer("llm.max_tokens", g.max_tokens);
    g.top_p = s.num("llm.top_p", g.top_p);
    g.max_retries = s.integer("llm.max_retries", g.max_retries);
    check_generation_config(g);
    return g;
}

PopulationPolicies population_from(const Settings& s) {
    PopulationPolicies p;
    p.selection.window_days = s.integer("population.window_days", p.selection.window_days);
    p.selection.min_sample =
        static_cast<std::size_t>(s.integer("population.min_sample", static_cast<int>(p.selection.min_sample)));
    p.smoothing.pseudo_count = s.num("population.pseudo_count", p.smoothing.pseudo_count);
    p.volatility.low_below = s.num("features.volatility_low_below", p.volatility.low_below);
    p.volatility.high_at = s.num("features.volatility_high_at", p.volatility.high_at);
    check_policies(p);
    return p;
}

inference::DecisionConfig decision_config_from(const Settings& s) {
    inference::DecisionConfig d;
    d.risk_aversion = s.num("decision.risk_aversion", d.risk_aversion);
    d.conservative_min_otm = s.num("decision.conservative_min_otm", d.conservative_min_otm);
    d.aggressive_max_otm = s.num("decision.aggressive_max_otm", d.aggressive_max_otm);
    d.position_cap = s.num("position_limit", d.position_cap);
    return d;
}

sim::BayesianEngineConfig engine_config_from(const Settings& s) {
    sim::BayesianEngineConfig e;
    e.generation = generation_config_from(s);
    e.population = population_from(s);
    e.decision = decision_config_from(s);
    e.calendar = calendar_from(s);
    return e;
}

}  // namespace wheelhouse::cli
