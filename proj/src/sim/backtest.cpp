#include "wheelhouse/sim/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/hash.hpp"

namespace wheelhouse::sim {

namespace v = bn::var;
using nlohmann::ordered_json;

namespace {

struct OptionPosition {
    OptionType type = OptionType::put;
    std::string ticker;
    double strike = 0.0;
    Date open_date;
    Date expiry;
    int contracts = 0;
    double open_premium = 0.0;
    std::size_t chain = 0;
    bool hold_to_expiry = false;
};

struct StockPosition {
    int shares = 0;
    double basis = 0.0;  // per share
};

struct Chain {
    std::string ticker;
    Date open_date;
    double strike = 0.0;
    double premium = 0.0;
    int contracts = 0;
    int days = 0;
    FactorStates factors;
    inference::TradeDecision decision;
    double collateral = 0.0;
    double pnl = 0.0;
    int rolls = 0;
};

struct Pending {
    double strike = 0.0;
    Date expiry;
    int remaining = 0;
    double fraction = 0.0;
    FactorStates factors;
    inference::TradeDecision decision;
};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

int floor_contracts(double notional, double strike) {
    if (!(notional > 0.0)) return 0;
    return static_cast<int>(std::floor(notional / (strike * 100.0) + 1e-9));
}

class Simulator {
public:
    Simulator(const BacktestConfig& config, const MarketData& data, DecisionEngine& engine)
        : cfg_(config), data_(data), engine_(engine) {
        tickers_ = cfg_.tickers;
        if (tickers_.empty())
            for (const auto& [t, _] : data_) tickers_.push_back(t);
        cash_ = cfg_.initial_capital;
        peak_ = cfg_.initial_capital;
        result_.initial_capital = cfg_.initial_capital;
        result_.final_equity = cfg_.initial_capital;
    }

    BacktestResult run() {
        std::set<Date> days;
        for (const auto& t : tickers_)
            for (const auto& b : data_.at(t).bars)
                if (b.date >= cfg_.start && b.date <= cfg_.end && cfg_.calendar.is_trading_day(b.date))
                    days.insert(b.date);
        if (!days.empty()) result_.audit.retrain_dates.push_back(*days.begin());
        int retrain_k = 1;
        for (Date d : days) {
            if (d >= cfg_.start.add_months(cfg_.retrain_months * retrain_k)) {
                engine_.retrain(d);
                result_.audit.retrain_dates.push_back(d);
                while (d >= cfg_.start.add_months(cfg_.retrain_months * retrain_k)) ++retrain_k;
            }
            step(d);
        }
        finish();
        return std::move(result_);
    }

private:
    const BacktestConfig& cfg_;
    const MarketData& data_;
    DecisionEngine& engine_;
    std::vector<std::string> tickers_;
    BacktestResult result_;

    double cash_ = 0.0;
    double peak_ = 0.0;
    std::vector<OptionPosition> options_;
    std::map<std::string, StockPosition> stocks_;
    std::vector<Chain> chains_;
    std::map<std::string, Pending> pending_;
    std::vector<TradeOutcome> recent_;
    int consecutive_losses_ = 0;

    // Independent accumulators for the accounting identity.
    double net_premiums_ = 0.0;
    double costs_ = 0.0;
    double realized_ = 0.0;

    double rate_cycle_sum_ = 0.0;
    double rate_annual_sum_ = 0.0;
    std::size_t rate_n_ = 0;
    double factors_sum_ = 0.0;
    std::size_t factors_n_ = 0;

    Date today_;
    std::map<std::string, MarketFeatures> features_today_;
    std::map<std::string, int> opened_today_;

    const Bar* bar_on(const std::string& ticker, Date d) const {
        const auto& s = data_.at(ticker);
        const auto i = s.index_on_or_before(d);
        if (!i || s.bars[*i].date != d) return nullptr;
        return &s.bars[*i];
    }

    double spot(const std::string& ticker) const {
        const Bar* b = bar_on(ticker, today_);
        if (!b) throw DataError("missing bar for " + ticker + " on " + today_.to_string());
        return b->close;
    }

    const MarketFeatures& features(const std::string& ticker) {
        auto it = features_today_.find(ticker);
        if (it == features_today_.end())
            it = features_today_.emplace(ticker, compute_features(data_.at(ticker), today_, cfg_.features)).first;
        return it->second;
    }

    double equity_before_today() const {
        return result_.curve.values.size() ? result_.curve.values[result_.curve.values.size() - 1]
                                           : cfg_.initial_capital;
    }

    double reserved(std::optional<std::size_t> except = {}) const {
        double r = 0.0;
        for (std::size_t i = 0; i < options_.size(); ++i)
            if (options_[i].type == OptionType::put && (!except || *except != i))
                r += options_[i].strike * 100.0 * options_[i].contracts;
        return r;
    }

    int adv_cap_contracts(const std::string& ticker) {
        const double adv = features(ticker).adv;
        const int cap = static_cast<int>(std::floor(cfg_.adv_cap * adv / 100.0 + 1e-9));
        return std::max(cap - opened_today_[ticker], 0);
    }

    void log(TradeRecord r) {
        r.date = today_;
        auto doc = trade_to_json(r);
        doc.erase("id");
        r.id = sha256_hex(doc.dump() + "/" + std::to_string(result_.trade_log.size())).substr(0, 16);
        result_.trade_log.push_back(std::move(r));
    }

    void note(std::string message) { result_.diagnostics.push_back(today_.to_string() + ": " + std::move(message)); }

    void track_rate(double premium, double strike, int days) {
        rate_cycle_sum_ += premium / strike;
        rate_annual_sum_ += premium / strike * 365.0 / days;
        ++rate_n_;
    }

    // Sells `contracts` options; returns the net cash received.
    double sell(OptionType type, const std::string& ticker, TradeAction action, double strike, double premium,
                int contracts, const FactorStates& factors) {
        const double gross = premium * 100.0 * contracts;
        const auto c = trade_costs(cfg_.costs, type, contracts, gross);
        cash_ += gross - c.total();
        net_premiums_ += gross;
        costs_ += c.total();
        result_.gross_premium += gross;
        result_.commissions += c.commission;
        result_.slippage += c.slippage;
        TradeRecord r;
        r.ticker = ticker;
        r.action = action;
        r.strike = strike;
        r.premium = premium;
        r.contracts = contracts;
        r.factors = factors;
        r.commission = c.commission;
        r.slippage = c.slippage;
        r.cash_flow = gross - c.total();
        r.option_type = to_string(type);
        log(std::move(r));
        if (type == OptionType::put) opened_today_[ticker] += contracts;
        return gross - c.total();
    }

    std::string outcome_of(double pnl, double collateral) const {
        if (std::abs(pnl) <= cfg_.breakeven_band * collateral) return "Breakeven";
        return pnl > 0.0 ? "Profit" : "Loss";
    }

    void close_chain(std::size_t idx, const std::string& assignment, double extra_pnl) {
        const Chain& ch = chains_[idx];
        const double pnl = ch.pnl + extra_pnl;
        const std::string outcome = outcome_of(pnl, ch.collateral);
        TradeRecord r;
        r.date = today_;
        r.ticker = ch.ticker;
        r.action = TradeAction::sell_put;
        r.strike = ch.strike;
        r.premium = ch.premium;
        r.contracts = ch.contracts;
        r.outcome = parse_outcome(outcome);
        r.factors = ch.factors;
        r.factors[v::assignment_probability] = assignment;
        r.factors[v::trade_outcome] = outcome;
        r.factors["Roll_Count"] = ch.rolls == 0 ? "Zero" : ch.rolls == 1 ? "One" : "Multiple";
        r.cash_flow = pnl;
        r.option_type = "put";
        r.id = trade_content_id(r);

        std::map<std::string, std::string> indicators;
        for (const char* k : {v::market_regime, v::volatility_level, v::technical_position})
            if (auto it = ch.factors.find(k); it != ch.factors.end()) indicators[k] = it->second;
        auto fb = record_feedback(ch.decision, r.id, today_, outcome, indicators);

        engine_.observe(r, fb);
        result_.closed_chains.push_back(r);
        result_.feedback.push_back(std::move(fb));
        recent_.push_back(*r.outcome);
        consecutive_losses_ = *r.outcome == TradeOutcome::loss ? consecutive_losses_ + 1 : 0;
    }

    void settle(std::size_t i, double px) {
        const OptionPosition p = options_[i];
        TradeRecord r;
        r.ticker = p.ticker;
        r.strike = p.strike;
        r.contracts = p.contracts;
        r.option_type = to_string(p.type);
        const int shares = 100 * p.contracts;
        if (p.type == OptionType::put) {
            if (px > p.strike) {
                r.action = TradeAction::expire_worthless;
                log(r);
                close_chain(p.chain, chains_[p.chain].rolls ? "Medium" : "Low", 0.0);
            } else {
                auto& st = stocks_[p.ticker];
                st.basis = (st.basis * st.shares + p.strike * shares) / (st.shares + shares);
                st.shares += shares;
                cash_ -= p.strike * shares;
                r.action = TradeAction::assign;
                r.cash_flow = -p.strike * shares;
                log(r);
                close_chain(p.chain, "High", (px - p.strike) * shares);
            }
        } else {
            if (px > p.strike) {
                auto& st = stocks_[p.ticker];
                cash_ += p.strike * shares;
                realized_ += (p.strike - st.basis) * shares;
                result_.realized_stock_pnl += (p.strike - st.basis) * shares;
                st.shares -= shares;
                if (st.shares == 0) stocks_.erase(p.ticker);
                r.action = TradeAction::assign;
                r.cash_flow = p.strike * shares;
                log(r);
            } else {
                r.action = TradeAction::expire_worthless;
                log(r);
            }
        }
    }

    // Returns false when the position stays open.
    bool roll(std::size_t i, double px) {
        OptionPosition& p = options_[i];
        const double vol = features(p.ticker).volatility;
        const int days_left = p.expiry - today_;
        const double close_px = price_option_premium(px, p.strike, vol, days_left, cfg_.risk_free_rate, OptionType::put);
        const double close_gross = close_px * 100.0 * p.contracts;
        const auto close_costs = trade_costs(cfg_.costs, OptionType::put, p.contracts, close_gross);
        const double others = reserved(i);
        if (cash_ - others < close_gross + close_costs.total()) {
            p.hold_to_expiry = true;
            note("insufficient cash to close " + p.ticker + " put; holding to expiry");
            return true;
        }
        cash_ -= close_gross + close_costs.total();
        net_premiums_ -= close_gross;
        costs_ += close_costs.total();
        result_.buy_to_close_paid += close_gross;
        result_.commissions += close_costs.commission;
        result_.slippage += close_costs.slippage;
        TradeRecord c;
        c.ticker = p.ticker;
        c.action = TradeAction::close;
        c.strike = p.strike;
        c.premium = close_px;
        c.contracts = p.contracts;
        c.commission = close_costs.commission;
        c.slippage = close_costs.slippage;
        c.cash_flow = -(close_gross + close_costs.total());
        c.option_type = "put";
        log(c);
        Chain& ch = chains_[p.chain];
        ch.pnl += c.cash_flow;

        const double strike = round_to_strike(px * (1.0 - cfg_.put_otm));
        const Date expiry = next_expiry(p.expiry, cfg_.cycle);
        const int days = expiry - today_;
        const double premium = strike > 0.0
                                   ? price_option_premium(px, strike, vol, days, cfg_.risk_free_rate, OptionType::put)
                                   : 0.0;
        const int n = strike > 0.0 ? std::min({p.contracts, adv_cap_contracts(p.ticker),
                                               floor_contracts(cash_ - others, strike)})
                                   : 0;
        if (n <= 0) {
            note("roll of " + p.ticker + " closed without a new put");
            const std::size_t chain = p.chain;
            options_.erase(options_.begin() + static_cast<std::ptrdiff_t>(i));
            close_chain(chain, "Medium", 0.0);
            return false;
        }
        ch.pnl += sell(OptionType::put, p.ticker, TradeAction::roll_put, strike, premium, n, {});
        ++ch.rolls;
        track_rate(premium, strike, days);
        p.strike = strike;
        p.expiry = expiry;
        p.contracts = n;
        p.open_premium = premium;
        p.open_date = today_;
        return true;
    }

    void process_options(std::set<std::string>& settled) {
        std::size_t i = 0;
        while (i < options_.size()) {
            const auto& p = options_[i];
            const double px = spot(p.ticker);
            if (today_ >= p.expiry) {
                settled.insert(p.ticker);
                settle(i, px);
                options_.erase(options_.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            if (p.type == OptionType::put && cfg_.rolling && !p.hold_to_expiry &&
                px <= p.strike * (1.0 + cfg_.roll_trigger)) {
                if (!roll(i, px)) continue;
            }
            ++i;
        }
    }

    void cover_stock() {
        for (const auto& [ticker, st] : stocks_) {
            int covered = 0;
            for (const auto& p : options_)
                if (p.type == OptionType::call && p.ticker == ticker) covered += p.contracts;
            const int n = st.shares / 100 - covered;
            if (n <= 0) continue;
            const double px = spot(ticker);
            const double strike = round_to_strike(st.basis);
            const Date expiry = next_expiry(today_, cfg_.cycle);
            const int days = expiry - today_;
            const double premium = price_option_premium(px, strike, features(ticker).volatility, days,
                                                        cfg_.risk_free_rate, OptionType::call);
            sell(OptionType::call, ticker, TradeAction::sell_call, strike, premium, n, {});
            track_rate(premium, strike, days);
            options_.push_back({OptionType::call, ticker, strike, today_, expiry, n, premium, 0, false});
        }
    }

    bool has_put(const std::string& ticker) const {
        return std::any_of(options_.begin(), options_.end(),
                           [&](const OptionPosition& p) { return p.ticker == ticker && p.type == OptionType::put; });
    }

    // Opens up to `wanted` contracts now; returns how many.
    int open_put(const std::string& ticker, double strike, Date expiry, int wanted, const FactorStates& factors,
                 const inference::TradeDecision& decision) {
        const double px = spot(ticker);
        const int days = expiry - today_;
        const double premium =
            price_option_premium(px, strike, features(ticker).volatility, days, cfg_.risk_free_rate, OptionType::put);
        const int n = std::min({wanted, adv_cap_contracts(ticker), floor_contracts(cash_ - reserved(), strike)});
        if (n <= 0) return 0;
        Chain ch;
        ch.ticker = ticker;
        ch.open_date = today_;
        ch.strike = strike;
        ch.premium = premium;
        ch.contracts = n;
        ch.days = days;
        ch.factors = factors;
        ch.decision = decision;
        ch.collateral = strike * 100.0 * n;
        ch.pnl = sell(OptionType::put, ticker, TradeAction::sell_put, strike, premium, n, factors);
        track_rate(premium, strike, days);
        chains_.push_back(std::move(ch));
        options_.push_back({OptionType::put, ticker, strike, today_, expiry, n, premium, chains_.size() - 1, false});
        return n;
    }

    void fill_pending(const std::set<std::string>& settled) {
        for (auto it = pending_.begin(); it != pending_.end();) {
            Pending& pd = it->second;
            if (today_ >= pd.expiry || settled.contains(it->first)) {
                note("dropping " + std::to_string(pd.remaining) + " unfilled contracts of " + it->first);
                it = pending_.erase(it);
                continue;
            }
            pd.remaining -= open_put(it->first, pd.strike, pd.expiry, pd.remaining, pd.factors, pd.decision);
            it = pd.remaining > 0 ? std::next(it) : pending_.erase(it);
        }
    }

    FactorStates portfolio_states(const PsychologicalState& psych) const {
        FactorStates s;
        const double equity = equity_before_today();
        const double drawdown = peak_ > 0.0 ? 1.0 - equity / peak_ : 0.0;
        s[v::psychological_state] =
            psych.stress_level >= 2.0 / 3.0 ? "Stressed" : psych.stress_level < 1.0 / 3.0 ? "Calm" : "Neutral";
        const double appetite = psych.confidence_level - psych.stress_level;
        s[v::risk_tolerance] = appetite > 0.2 ? "High" : appetite < -0.2 ? "Low" : "Medium";
        s["Confidence_Level"] = level_of(psych.confidence_level);
        s["FOMO_Level"] = level_of(psych.fomo_level);
        s["Tilt_Risk"] = level_of(psych.tilt_risk);
        s["Drawdown_State"] = drawdown < 0.05 ? "None" : drawdown < 0.15 ? "Moderate" : "Severe";
        s["Portfolio_Utilization"] = level_of(equity > 0.0 ? reserved() / equity : 1.0);
        s["Recent_Outcome"] = recent_.empty() ? "Breakeven" : to_string(recent_.back());
        return s;
    }

    PsychologicalState psychology(const MarketFeatures& f) const {
        const double equity = equity_before_today();
        const double drawdown = peak_ > 0.0 ? std::max(1.0 - equity / peak_, 0.0) : 0.0;
        int wins = 0, losses = 0;
        for (std::size_t k = recent_.size() > 5 ? recent_.size() - 5 : 0; k < recent_.size(); ++k) {
            wins += recent_[k] == TradeOutcome::profit;
            losses += recent_[k] == TradeOutcome::loss;
        }
        PsychologicalState p;
        p.stress_level = clamp01(5.0 * drawdown + 0.15 * losses);
        p.confidence_level = clamp01(0.5 + 0.1 * (wins - losses) - 2.0 * drawdown);
        p.fomo_level = clamp01(5.0 * std::max(f.trend_return, 0.0));
        p.tilt_risk = clamp01(0.25 * consecutive_losses_);
        return p;
    }

    double relative_return(const std::string& ticker) {
        double sum = 0.0;
        int n = 0;
        for (const auto& t : tickers_) {
            const auto& s = data_.at(t);
            if (!s.index_on_or_before(today_ - 1)) continue;
            sum += features(t).regime_return;
            ++n;
        }
        return n ? features(ticker).regime_return - sum / n : 0.0;
    }

    void decide(const std::string& ticker) {
        const MarketFeatures& f = features(ticker);
        DecisionRequest req;
        req.features = f;
        req.psych = psychology(f);
        req.factors = market_factor_states(f, cfg_.features, relative_return(ticker));
        req.factors.merge(portfolio_states(req.psych));
        req.put_otm = cfg_.put_otm;
        req.position_limit = cfg_.position_limit;

        EngineDecision ed = engine_.decide(req);
        ++result_.decisions;
        AuditEntry entry{ticker, today_, f.feature_date, ed.latest_record_date, today_};
        if (!entry.ok()) ++result_.audit.violations;
        result_.audit.entries.push_back(entry);
        for (auto& d : ed.diagnostics) note(ticker + ": " + d);

        const auto& d = ed.decision;
        if (d.action != inference::Action::sell_put) {
            ++result_.skipped_decisions;
            return;
        }
        const double px = spot(ticker);
        const double strike = round_to_strike(px * (1.0 - d.strike_otm_pct));
        if (!(strike > 0.0)) {
            ++result_.skipped_decisions;
            return;
        }
        const Date expiry = next_expiry(today_, cfg_.cycle);
        const int days = expiry - today_;
        const double premium = price_option_premium(px, strike, f.volatility, days, cfg_.risk_free_rate, OptionType::put);
        if (premium / strike < cfg_.premium_threshold) {
            ++result_.skipped_decisions;
            note(ticker + ": premium below threshold");
            return;
        }
        const double fraction = std::min(d.position_fraction, cfg_.position_limit);
        const int target = floor_contracts(fraction * equity_before_today(), strike);

        FactorStates factors = req.factors;
        factors[v::strike_selection] = d.strike_selection;
        const double rate = premium / strike * 365.0 / days;
        factors[v::premium_rate] = rate >= 0.15 ? "High" : rate < 0.05 ? "Low" : "Medium";
        factors["Days_To_Expiry"] = days < 10 ? "Short" : days <= 31 ? "Medium" : "Long";
        factors["OTM_Band"] = d.strike_otm_pct >= 0.10 ? "Deep" : d.strike_otm_pct >= 0.05 ? "Standard" : "Near";
        factors["Position_Size"] = fraction < 0.05 ? "Small" : fraction <= 0.10 ? "Medium" : "Large";

        const int opened = target > 0 ? open_put(ticker, strike, expiry, target, factors, d) : 0;
        if (opened == 0) {
            ++result_.skipped_decisions;
            note(ticker + ": zero contracts affordable");
            return;
        }
        factors_sum_ += static_cast<double>(ed.decision_factors);
        ++factors_n_;
        if (opened < target) pending_[ticker] = {strike, expiry, target - opened, fraction, factors, d};
    }

    void mark() {
        double stock_value = 0.0, unrealized = 0.0, liability = 0.0;
        for (const auto& [ticker, st] : stocks_) {
            const double px = spot(ticker);
            stock_value += px * st.shares;
            unrealized += (px - st.basis) * st.shares;
        }
        for (const auto& p : options_) {
            const double px = spot(p.ticker);
            const double years = (p.expiry - today_) / 365.0;
            liability += 100.0 * p.contracts *
                         black_scholes(px, p.strike, features(p.ticker).volatility, std::max(years, 0.0),
                                       cfg_.risk_free_rate, p.type);
        }
        const double lhs = cash_ + stock_value;
        const double rhs = cfg_.initial_capital + net_premiums_ + realized_ + unrealized - costs_;
        result_.audit.max_accounting_error = std::max(result_.audit.max_accounting_error, std::abs(lhs - rhs));
        if (reserved() > cash_ + 1e-6) ++result_.audit.collateral_violations;
        for (const auto& [ticker, n] : opened_today_)
            if (n * 100.0 > cfg_.adv_cap * features(ticker).adv + 1e-6) ++result_.audit.adv_violations;

        const double equity = lhs - liability;
        peak_ = std::max(peak_, equity);
        result_.curve.dates.push_back(today_);
        const auto n = result_.curve.values.size();
        result_.curve.values.conservativeResize(n + 1);
        result_.curve.values[n] = equity;
        result_.option_liability.push_back(liability);
    }

    void step(Date d) {
        today_ = d;
        features_today_.clear();
        opened_today_.clear();
        std::set<std::string> settled;
        process_options(settled);
        cover_stock();
        fill_pending(settled);
        for (const auto& t : tickers_) {
            if (!bar_on(t, d) || settled.contains(t) || has_put(t) || stocks_.contains(t) || pending_.contains(t))
                continue;
            if (!data_.at(t).index_on_or_before(d - 1)) continue;
            decide(t);
        }
        mark();
    }

    void finish() {
        auto& r = result_;
        r.counts = count_trades(r.trade_log);
        if (r.curve.values.size()) r.final_equity = r.curve.values[r.curve.values.size() - 1];
        if (rate_n_) {
            r.premium_rate_cycle = rate_cycle_sum_ / rate_n_;
            r.premium_rate_annual = rate_annual_sum_ / rate_n_;
        }
        r.decision_factors_per_trade = factors_n_ ? factors_sum_ / factors_n_ : 0.0;

        double start_equity = cfg_.initial_capital;
        for (std::size_t i = 0; i < r.curve.dates.size(); ++i) {
            const int year = r.curve.dates[i].year();
            if (r.years.empty() || r.years.back().year != year) {
                if (!r.years.empty()) start_equity = r.years.back().end_equity;
                r.years.push_back({year, start_equity, start_equity, 0.0, 0});
            }
            r.years.back().end_equity = r.curve.values[static_cast<Eigen::Index>(i)];
        }
        for (auto& y : r.years) y.return_ = y.end_equity / y.start_equity - 1.0;
        for (const auto& t : r.trade_log) {
            if (t.action == TradeAction::close) continue;
            for (auto& y : r.years)
                if (y.year == t.date.year()) ++y.trades;
        }
    }
};

}  // namespace

void check_backtest_config(const BacktestConfig& c, const MarketData& data) {
    for (double f : {c.put_otm, c.roll_trigger, c.position_limit, c.adv_cap})
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("fractions must lie in (0, 1]");
    if (!(c.initial_capital > 0.0)) throw ConfigError("initial capital must be positive");
    if (c.retrain_months < 1) throw ConfigError("retrain interval must be at least one month");
    if (!(c.premium_threshold >= 0.0) || !(c.breakeven_band >= 0.0))
        throw ConfigError("premium threshold and breakeven band must be non-negative");
    check_cost_model(c.costs);
    check_feature_config(c.features);
    std::vector<std::string> tickers = c.tickers;
    if (tickers.empty())
        for (const auto& [t, _] : data) tickers.push_back(t);
    if (tickers.empty()) throw ConfigError("no tickers to trade");
    for (const auto& t : tickers) {
        const auto it = data.find(t);
        if (it == data.end()) throw ConfigError("no market data for ticker " + t);
        if (c.end < c.start) continue;
        const auto& bars = it->second.bars;
        if (bars.empty() || c.start <= bars.front().date || c.end > bars.back().date)
            throw DataError("date range " + c.start.to_string() + ".." + c.end.to_string() +
                            " not covered by data for " + t);
    }
}

ordered_json backtest_config_json(const BacktestConfig& c) {
    ordered_json j;
    j["tickers"] = c.tickers;
    j["start"] = c.start.to_string();
    j["end"] = c.end.to_string();
    j["initial_capital"] = c.initial_capital;
    j["put_otm"] = c.put_otm;
    j["roll_trigger"] = c.roll_trigger;
    j["position_limit"] = c.position_limit;
    j["adv_cap"] = c.adv_cap;
    j["cycle"] = to_string(c.cycle);
    j["rolling"] = c.rolling;
    j["retrain_months"] = c.retrain_months;
    j["risk_free_rate"] = c.risk_free_rate;
    j["premium_threshold"] = c.premium_threshold;
    j["breakeven_band"] = c.breakeven_band;
    j["seed"] = c.seed;
    j["costs"] = {{"enabled", c.costs.enabled},
                  {"commission_per_contract", c.costs.commission_per_contract},
                  {"exchange_fee_per_contract", c.costs.exchange_fee_per_contract},
                  {"min_commission", c.costs.min_commission},
                  {"slippage_put", c.costs.slippage_put},
                  {"slippage_call", c.costs.slippage_call}};
    const auto& f = c.features;
    j["features"] = {{"volatility_window", f.volatility_window},
                     {"volatility_floor", f.volatility_floor},
                     {"regime_window", f.regime_window},
                     {"regime_threshold", f.regime_threshold},
                     {"trend_window", f.trend_window},
                     {"trend_threshold", f.trend_threshold},
                     {"rsi_window", f.rsi_window},
                     {"rsi_oversold", f.rsi_oversold},
                     {"rsi_overbought", f.rsi_overbought},
                     {"fundamentals_window", f.fundamentals_window},
                     {"fundamentals_threshold", f.fundamentals_threshold},
                     {"adv_window", f.adv_window},
                     {"range_window", f.range_window},
                     {"volatility_low_below", f.volatility.low_below},
                     {"volatility_high_at", f.volatility.high_at}};
    ordered_json holidays = ordered_json::array();
    for (Date d : c.calendar.holidays()) holidays.push_back(d.to_string());
    j["holidays"] = std::move(holidays);
    return j;
}

TradeCounts count_trades(const std::vector<TradeRecord>& log) {
    TradeCounts c;
    for (const auto& r : log) {
        const bool put = r.option_type == "put";
        switch (r.action) {
            case TradeAction::sell_put: ++c.puts_sold; break;
            case TradeAction::roll_put: ++c.puts_rolled; break;
            case TradeAction::sell_call: ++c.calls_sold; break;
            case TradeAction::close: ++c.buy_to_close; break;
            case TradeAction::expire_worthless: ++(put ? c.puts_expired : c.calls_expired); break;
            case TradeAction::assign: ++(put ? c.puts_assigned : c.calls_assigned); break;
        }
    }
    return c;
}

BacktestResult run_backtest(const BacktestConfig& config, const MarketData& data, DecisionEngine& engine) {
    check_backtest_config(config, data);
    return Simulator(config, data, engine).run();
}

double replay_max_equity_error(const BacktestResult& result, const BacktestConfig& config, const MarketData& data) {
    double cash = config.initial_capital;
    std::map<std::string, long> shares;
    std::size_t k = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < result.curve.dates.size(); ++i) {
        const Date d = result.curve.dates[i];
        for (; k < result.trade_log.size() && result.trade_log[k].date <= d; ++k) {
            const auto& r = result.trade_log[k];
            cash += r.cash_flow;
            if (r.action == TradeAction::assign)
                shares[r.ticker] += (r.option_type == "put" ? 100L : -100L) * r.contracts;
        }
        double stock = 0.0;
        for (const auto& [t, n] : shares) {
            if (n == 0) continue;
            const auto& s = data.at(t);
            stock += static_cast<double>(n) * s.bars[*s.index_on_or_before(d)].close;
        }
        const double rebuilt = cash + stock - result.option_liability[i];
        worst = std::max(worst, std::abs(rebuilt - result.curve.values[static_cast<Eigen::Index>(i)]));
    }
    return worst;
}

ordered_json summary_json(const BacktestResult& r) {
    const auto& c = r.counts;
    const double puts = static_cast<double>(c.puts_sold);
    auto ratio = [&](std::size_t n) { return puts > 0 ? n / puts : 0.0; };
    double span_years = 0.0;
    if (r.curve.dates.size() > 1) span_years = (r.curve.dates.back() - r.curve.dates.front()) / 365.25;

    double mean_year = 0.0;
    std::size_t winning = 0;
    for (const auto& y : r.years) {
        mean_year += y.return_;
        winning += y.return_ > 0.0;
    }
    if (!r.years.empty()) mean_year /= static_cast<double>(r.years.size());

    std::optional<double> mean_month;
    if (r.curve.dates.size() > 1) {
        const auto m = metrics::monthly_returns(r.curve);
        if (m.returns.size() > 0) mean_month = m.returns.mean();
    }
    std::optional<double> annualized;
    if (span_years > 0.0) annualized = std::pow(r.final_equity / r.initial_capital, 1.0 / span_years) - 1.0;

    ordered_json j;
    j["Average Annual Return"] = mean_year;
    j["Annualized Return"] = annualized ? ordered_json(*annualized) : ordered_json(nullptr);
    j["Initial Capital"] = r.initial_capital;
    j["Final Portfolio Value"] = r.final_equity;
    j["Total Premium Collected"] = r.gross_premium;
    j["Number of Trades"] = c.trades();
    j["Trades per Year"] = span_years > 0.0 ? ordered_json(c.trades() / span_years) : ordered_json(nullptr);
    j["Average Premium/Trade"] = c.trades() ? r.gross_premium / static_cast<double>(c.trades()) : 0.0;
    j["Put Trades Sold"] = c.puts_sold;
    j["Puts Expired Worthless"] = {{"count", c.puts_expired}, {"ratio_to_puts_sold", ratio(c.puts_expired)}};
    j["Puts Rolled"] = {{"count", c.puts_rolled}, {"ratio_to_puts_sold", ratio(c.puts_rolled)}};
    j["Puts Assigned"] = {{"count", c.puts_assigned}, {"ratio_to_puts_sold", ratio(c.puts_assigned)}};
    j["Calls Sold"] = c.calls_sold;
    j["Calls Expired Worthless"] = c.calls_expired;
    j["Calls Assigned"] = c.calls_assigned;
    j["Buy To Close"] = c.buy_to_close;
    j["Average Premium Rate"] = {{"per_cycle", r.premium_rate_cycle}, {"annualized", r.premium_rate_annual}};
    j["Average Monthly Return"] = mean_month ? ordered_json(*mean_month) : ordered_json(nullptr);
    j["Winning Years"] = {{"winning", winning}, {"total", r.years.size()}};
    j["Decision Factors/Trade"] = r.decision_factors_per_trade;
    j["Total Commissions"] = r.commissions;
    j["Total Slippage"] = r.slippage;
    j["Buy To Close Paid"] = r.buy_to_close_paid;
    j["Realized Stock P&L"] = r.realized_stock_pnl;
    j["Decisions"] = r.decisions;
    j["Skipped Decisions"] = r.skipped_decisions;
    ordered_json years = ordered_json::array();
    for (const auto& y : r.years)
        years.push_back({{"year", y.year},
                         {"start_equity", y.start_equity},
                         {"end_equity", y.end_equity},
                         {"return", y.return_},
                         {"trades", y.trades}});
    j["Years"] = std::move(years);
    ordered_json retrains = ordered_json::array();
    for (Date d : r.audit.retrain_dates) retrains.push_back(d.to_string());
    j["Audit"] = {{"decisions", r.audit.entries.size()},
                  {"temporal_violations", r.audit.violations},
                  {"max_accounting_error", r.audit.max_accounting_error},
                  {"collateral_violations", r.audit.collateral_violations},
                  {"adv_violations", r.audit.adv_violations},
                  {"retrain_dates", std::move(retrains)}};
    return j;
}

}  // namespace wheelhouse::sim
