#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/rng.hpp"
#include "wheelhouse/sim/backtest.hpp"
#include "wheelhouse/sim/synthetic.hpp"
#include "test_markets.hpp"
#include "test_oracles.hpp"

using namespace wheelhouse;
using namespace wheelhouse::sim;
using namespace wheelhouse::test_support;

// ---- pricing ----

TEST(Pricing, ZeroVolatilityOutOfTheMoneyPutIsWorthless) {
    EXPECT_EQ(price_option_premium(100.0, 90.0, 0.0, 30, 0.0, OptionType::put), 0.0);
}

TEST(Pricing, ZeroVolatilityInTheMoneyIsDiscountedIntrinsic) {
    const double t = 30.0 / 365.0;
    EXPECT_NEAR(price_option_premium(80.0, 90.0, 0.0, 30, 0.05, OptionType::put), 90.0 * std::exp(-0.05 * t) - 80.0,
                1e-12);
}

TEST(Pricing, MatchesQuadratureReference) {
    const double ref = quadrature_price(100.0, 90.0, 0.30, 30.0 / 365.0, 0.0, OptionType::put);
    EXPECT_NEAR(price_option_premium(100.0, 90.0, 0.30, 30, 0.0, OptionType::put), ref, 1e-6);
}

TEST(Pricing, MatchesQuadratureAcrossInputs) {
    Rng rng = make_rng(11);
    for (int i = 0; i < 40; ++i) {
        const double s = 20.0 + 180.0 * uniform01(rng);
        const double k = s * (0.7 + 0.6 * uniform01(rng));
        const double vol = 0.05 + 0.8 * uniform01(rng);
        const int days = 1 + static_cast<int>(uniform_index(rng, 365));
        const double r = 0.06 * uniform01(rng);
        for (auto type : {OptionType::put, OptionType::call}) {
            const double ref = quadrature_price(s, k, vol, days / 365.0, r, type);
            EXPECT_NEAR(price_option_premium(s, k, vol, days, r, type), ref, 1e-6) << i;
        }
    }
}

TEST(Pricing, PutCallParity) {
    Rng rng = make_rng(12);
    for (int i = 0; i < 500; ++i) {
        const double s = 1.0 + 300.0 * uniform01(rng);
        const double k = s * (0.5 + uniform01(rng));
        const double vol = 1.5 * uniform01(rng);
        const double t = 2.0 * uniform01(rng) + 1e-3;
        const double r = 0.1 * uniform01(rng);
        const double call = black_scholes(s, k, vol, t, r, OptionType::call);
        const double put = black_scholes(s, k, vol, t, r, OptionType::put);
        EXPECT_NEAR(call - put, s - k * std::exp(-r * t), 1e-9 * std::max(1.0, s)) << i;
    }
}

TEST(Pricing, NonNegativeAndAboveDiscountedIntrinsic) {
    Rng rng = make_rng(13);
    for (int i = 0; i < 500; ++i) {
        const double s = 10.0 + 100.0 * uniform01(rng);
        const double k = s * (0.5 + uniform01(rng));
        const double vol = uniform01(rng);
        const int days = 1 + static_cast<int>(uniform_index(rng, 400));
        const double r = 0.05 * uniform01(rng);
        const double disc = std::exp(-r * days / 365.0);
        const double put = price_option_premium(s, k, vol, days, r, OptionType::put);
        const double call = price_option_premium(s, k, vol, days, r, OptionType::call);
        EXPECT_GE(put, std::max(k * disc - s, 0.0) - 1e-9);
        EXPECT_GE(call, std::max(s - k * disc, 0.0) - 1e-9);
    }
}

TEST(Pricing, RejectsDomainViolations) {
    EXPECT_THROW(price_option_premium(0.0, 90.0, 0.3, 30, 0.0, OptionType::put), DomainError);
    EXPECT_THROW(price_option_premium(100.0, -1.0, 0.3, 30, 0.0, OptionType::put), DomainError);
    EXPECT_THROW(price_option_premium(100.0, 90.0, -0.1, 30, 0.0, OptionType::put), DomainError);
    EXPECT_THROW(price_option_premium(100.0, 90.0, 0.3, 0, 0.0, OptionType::put), DomainError);
}

// ---- costs ----

TEST(Costs, HandComputedTable) {
    const auto& table = test_support::cost_table();
    ASSERT_EQ(table.size(), 20u);
    const CostModel model;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& c = table[i];
        const auto got = trade_costs(model, c.type, c.contracts, c.gross);
        EXPECT_NEAR(got.commission, c.commission, 1e-9) << i;
        EXPECT_NEAR(got.slippage, c.slippage, 1e-9) << i;
    }
}

TEST(Costs, DisabledModelCostsNothing) {
    CostModel m;
    m.enabled = false;
    EXPECT_EQ(trade_costs(m, OptionType::put, 5, 1000.0).total(), 0.0);
}

TEST(Costs, NegativeValuesRejected) {
    CostModel m;
    m.slippage_put = -0.1;
    EXPECT_THROW(check_cost_model(m), ConfigError);
}

TEST(Strikes, GridRounding) {
    EXPECT_DOUBLE_EQ(round_to_strike(90.0), 90.0);
    EXPECT_DOUBLE_EQ(round_to_strike(90.4), 90.0);
    EXPECT_DOUBLE_EQ(round_to_strike(90.6), 91.0);
    EXPECT_DOUBLE_EQ(round_to_strike(22.3), 22.5);
    EXPECT_DOUBLE_EQ(round_to_strike(22.2), 22.0);
    EXPECT_DOUBLE_EQ(round_to_strike(24.9), 25.0);
    EXPECT_DOUBLE_EQ(round_to_strike(25.4), 25.0);
}

// ---- calendar and features ----

TEST(Expiry, WeeklyIsFirstFridayAtLeastSevenDaysOut) {
    EXPECT_EQ(next_expiry(Date(2024, 1, 8), ExpiryCycle::weekly), Date(2024, 1, 19));
    EXPECT_EQ(next_expiry(Date(2024, 1, 12), ExpiryCycle::weekly), Date(2024, 1, 19));
    EXPECT_EQ(next_expiry(Date(2024, 1, 13), ExpiryCycle::weekly), Date(2024, 1, 26));
}

TEST(Expiry, MonthlyIsThirdFriday) {
    EXPECT_EQ(next_expiry(Date(2024, 1, 2), ExpiryCycle::monthly), Date(2024, 1, 19));
    EXPECT_EQ(next_expiry(Date(2024, 1, 15), ExpiryCycle::monthly), Date(2024, 2, 16));
    EXPECT_EQ(next_expiry(Date(2024, 12, 10), ExpiryCycle::monthly), Date(2024, 12, 20));
    EXPECT_EQ(next_expiry(Date(2024, 12, 16), ExpiryCycle::monthly), Date(2025, 1, 17));
}

TEST(Features, IgnoreTheDecisionDayAndLater) {
    auto s = synthetic_bars("AAA", Date(2023, 1, 2), Date(2023, 12, 29), {}, 5);
    const Date d = s.bars[200].date;
    const auto before = compute_features(s, d, {});
    for (std::size_t i = 200; i < s.bars.size(); ++i) s.bars[i].close *= 3.0;
    const auto after = compute_features(s, d, {});
    EXPECT_EQ(before.feature_date, s.bars[199].date);
    EXPECT_EQ(before.last_close, after.last_close);
    EXPECT_EQ(before.volatility, after.volatility);
    EXPECT_EQ(before.rsi, after.rsi);
    EXPECT_EQ(before.adv, after.adv);
}

TEST(Features, RegimeFollowsTrailingReturn) {
    std::vector<double> up, down;
    for (int i = 0; i < 80; ++i) {
        up.push_back(100.0 * std::pow(1.002, i));
        down.push_back(100.0 * std::pow(0.998, i));
    }
    const auto fu = compute_features(scripted_bars("U", Date(2024, 1, 1), up), Date(2024, 6, 1), {});
    const auto fd = compute_features(scripted_bars("D", Date(2024, 1, 1), down), Date(2024, 6, 1), {});
    EXPECT_EQ(fu.regime, MarketRegime::bull);
    EXPECT_EQ(fd.regime, MarketRegime::bear);
    EXPECT_GT(fu.rsi, 70.0);
    EXPECT_LT(fd.rsi, 30.0);
}

TEST(Features, NoHistoryIsADataError) {
    const auto s = scripted_bars("X", Date(2024, 1, 2), {100.0, 101.0});
    EXPECT_THROW(compute_features(s, Date(2024, 1, 2), {}), DataError);
}

// ---- backtest ----

TEST(Backtest, EmptyRangeKeepsCapital) {
    const auto data = single(scripted_bars("FLAT", Date(2024, 1, 1), std::vector<double>(60, 100.0)));
    auto cfg = base_config(Date(2024, 2, 10), Date(2024, 2, 1));
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_TRUE(r.trade_log.empty());
    EXPECT_EQ(r.final_equity, cfg.initial_capital);
}

TEST(Backtest, SingleFlatCycleMatchesHandLedger) {
    const auto data = single(scripted_bars("FLAT", Date(2023, 11, 1), std::vector<double>(90, 100.0)));
    auto cfg = base_config(Date(2024, 1, 16), Date(2024, 2, 16));
    cfg.cycle = ExpiryCycle::monthly;
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);

    // Strike 90, 31 days, 1 contract (10,000 / 9,000), commission at the minimum.
    const double premium = quadrature_price(100.0, 90.0, 0.30, 31.0 / 365.0, 0.0, OptionType::put);
    const double gross = premium * 100.0;
    const double net = gross - 1.00 - 0.0015 * gross;
    ASSERT_EQ(r.trade_log.size(), 2u);
    EXPECT_EQ(r.trade_log[0].action, TradeAction::sell_put);
    EXPECT_EQ(r.trade_log[0].strike, 90.0);
    EXPECT_EQ(r.trade_log[0].contracts, 1);
    EXPECT_EQ(r.trade_log[1].action, TradeAction::expire_worthless);
    EXPECT_EQ(r.trade_log[1].date, Date(2024, 2, 16));
    EXPECT_NEAR(r.final_equity, cfg.initial_capital + net, 1e-6);
    EXPECT_EQ(r.counts.puts_sold, 1u);
    EXPECT_EQ(r.counts.puts_expired, 1u);
}

TEST(Backtest, UntouchedPutKeepsFullPremium) {
    const auto data = single(scripted_bars("UP", Date(2023, 11, 1), std::vector<double>(90, 100.0)));
    auto cfg = base_config(Date(2024, 1, 16), Date(2024, 2, 16));
    cfg.cycle = ExpiryCycle::monthly;
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    ASSERT_EQ(r.closed_chains.size(), 1u);
    EXPECT_EQ(r.closed_chains[0].factors.at(bn::var::assignment_probability), "Low");
    EXPECT_NEAR(r.closed_chains[0].cash_flow, r.trade_log[0].cash_flow, 1e-12);
}

TEST(Backtest, RollsExactlyOnTriggerDates) {
    const auto data = roll_path_market();
    auto cfg = base_config(Date(2024, 1, 8), Date(2024, 2, 2));
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_EQ(dates_of(r, TradeAction::roll_put), (std::vector<Date>{Date(2024, 1, 11), Date(2024, 1, 16)}));
    EXPECT_EQ(dates_of(r, TradeAction::close), (std::vector<Date>{Date(2024, 1, 11), Date(2024, 1, 16)}));
    std::vector<double> strikes;
    for (const auto& t : r.trade_log)
        if (t.action == TradeAction::sell_put || t.action == TradeAction::roll_put) strikes.push_back(t.strike);
    ASSERT_GE(strikes.size(), 3u);
    EXPECT_EQ(strikes[0], 90.0);
    EXPECT_EQ(strikes[1], 85.0);
    EXPECT_EQ(strikes[2], 80.0);
    EXPECT_EQ(r.counts.puts_assigned, 0u);
    // Each roll pushed expiry one cycle: 01-19 -> 01-26 -> 02-02.
    EXPECT_EQ(dates_of(r, TradeAction::expire_worthless), (std::vector<Date>{Date(2024, 2, 2)}));
    ASSERT_EQ(r.closed_chains.size(), 1u);
    EXPECT_EQ(r.closed_chains[0].factors.at("Roll_Count"), "Multiple");
    EXPECT_EQ(r.closed_chains[0].factors.at(bn::var::assignment_probability), "Medium");
}

TEST(Backtest, RollCashMatchesLedger) {
    const auto data = roll_path_market();
    auto cfg = base_config(Date(2024, 1, 8), Date(2024, 2, 2));
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    std::size_t rolls = 0;
    for (std::size_t i = 0; i + 1 < r.trade_log.size(); ++i) {
        const auto& close = r.trade_log[i];
        const auto& reopen = r.trade_log[i + 1];
        if (close.action != TradeAction::close) continue;
        ASSERT_EQ(reopen.action, TradeAction::roll_put);
        ++rolls;
        const double close_gross = close.premium * 100.0 * close.contracts;
        const double open_gross = reopen.premium * 100.0 * reopen.contracts;
        auto fees = [](int n) { return std::max(0.75 * n, 1.00); };
        const double expected =
            (open_gross - fees(reopen.contracts) - 0.0015 * open_gross) -
            (close_gross + fees(close.contracts) + 0.0015 * close_gross);
        EXPECT_NEAR(close.cash_flow + reopen.cash_flow, expected, 0.005);
    }
    EXPECT_EQ(rolls, 2u);
    EXPECT_LT(replay_max_equity_error(r, cfg, data), 0.01);
}

TEST(Backtest, CrashPathWithRollingAvoidsAssignment) {
    std::vector<double> path;
    for (int i = 0; i < 60; ++i) path.push_back(100.0 * std::pow(0.98, i));
    const auto data = single(scripted_bars("CRASH", Date(2023, 10, 2), with_history(100.0, 60, path)));
    const Date start = data.at("CRASH").bars[60].date;
    auto cfg = base_config(start, data.at("CRASH").bars.back().date);
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_EQ(r.counts.puts_assigned, 0u);
    EXPECT_GT(r.counts.puts_rolled, 5u);
    EXPECT_EQ(r.audit.collateral_violations, 0u);
}

TEST(Backtest, CrashPathWithoutRollingAssignsThenSellsCallAtStrike) {
    std::vector<double> path{100, 98, 96, 94, 92, 90, 88, 86, 85, 85, 85, 85, 85};
    const auto data = single(scripted_bars("CRASH", Date(2023, 10, 2), with_history(100.0, 60, path)));
    const Date start = data.at("CRASH").bars[60].date;  // 2023-12-25 is a Monday
    auto cfg = base_config(start, data.at("CRASH").bars.back().date);
    cfg.rolling = false;
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_EQ(r.counts.puts_rolled, 0u);
    ASSERT_EQ(r.counts.puts_assigned, 1u);
    const auto assign = dates_of(r, TradeAction::assign);
    const auto calls = dates_of(r, TradeAction::sell_call);
    ASSERT_EQ(calls.size(), 1u);
    EXPECT_EQ(calls[0], assign[0]);
    for (const auto& t : r.trade_log)
        if (t.action == TradeAction::sell_call) EXPECT_EQ(t.strike, 90.0);
    ASSERT_EQ(r.closed_chains.size(), 1u);
    EXPECT_EQ(r.closed_chains[0].factors.at(bn::var::assignment_probability), "High");
    EXPECT_EQ(*r.closed_chains[0].outcome, TradeOutcome::loss);
    EXPECT_LT(r.audit.max_accounting_error, 0.01);
    EXPECT_LT(replay_max_equity_error(r, cfg, data), 0.01);
}

TEST(Backtest, CalledAwayWhenSpotRecoversAboveCallStrike) {
    std::vector<double> path{100, 95, 90, 87, 86, 85, 85, 85, 85, 85};
    for (int i = 0; i < 15; ++i) path.push_back(95.0);
    const auto data = single(scripted_bars("BACK", Date(2023, 10, 2), with_history(100.0, 60, path)));
    auto cfg = base_config(data.at("BACK").bars[60].date, data.at("BACK").bars.back().date);
    cfg.rolling = false;
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_EQ(r.counts.puts_assigned, 1u);
    EXPECT_EQ(r.counts.calls_assigned, 1u);
    EXPECT_NEAR(r.realized_stock_pnl, 0.0, 1e-9);  // called away at the assignment price
    EXPECT_LT(replay_max_equity_error(r, cfg, data), 0.01);
}

TEST(Backtest, MissingBarNamesTickerAndDate) {
    auto s = scripted_bars("GAP", Date(2023, 11, 1), std::vector<double>(80, 100.0));
    const Date gap = s.bars[65].date;
    s.bars.erase(s.bars.begin() + 65);
    MarketData data = single(std::move(s));
    data.emplace("FULL", scripted_bars("FULL", Date(2023, 11, 1), std::vector<double>(80, 50.0)));
    auto cfg = base_config(data.at("FULL").bars[60].date, data.at("FULL").bars[75].date);
    RuleEngine engine;
    try {
        run_backtest(cfg, data, engine);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("GAP"), std::string::npos);
        EXPECT_NE(what.find(gap.to_string()), std::string::npos);
    }
}

TEST(Backtest, AdvCapSplitsAcrossDays) {
    const auto data = single(scripted_bars("THIN", Date(2023, 11, 1), std::vector<double>(90, 100.0), 20000.0));
    auto cfg = base_config(Date(2024, 1, 16), Date(2024, 1, 31));
    cfg.initial_capital = 1.0e6;  // target 11 contracts, cap 10 per day
    cfg.cycle = ExpiryCycle::monthly;
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    std::map<Date, int> per_day;
    int total = 0;
    for (const auto& t : r.trade_log)
        if (t.action == TradeAction::sell_put) {
            per_day[t.date] += t.contracts;
            total += t.contracts;
        }
    EXPECT_EQ(total, 11);
    ASSERT_EQ(per_day.size(), 2u);
    EXPECT_EQ(per_day.begin()->second, 10);
    for (const auto& [d, n] : per_day) EXPECT_LE(n * 100.0, 0.05 * 20000.0);
    EXPECT_EQ(r.audit.adv_violations, 0u);
}

TEST(Backtest, ZeroAffordableContractsSkips) {
    const auto data = single(scripted_bars("BIG", Date(2023, 11, 1), std::vector<double>(90, 1000.0)));
    auto cfg = base_config(Date(2024, 1, 16), Date(2024, 1, 31));
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_TRUE(r.trade_log.empty());
    EXPECT_GT(r.skipped_decisions, 0u);
}

TEST(Backtest, PremiumThresholdSkips) {
    const auto data = single(scripted_bars("FLAT", Date(2023, 11, 1), std::vector<double>(90, 100.0)));
    auto cfg = base_config(Date(2024, 1, 16), Date(2024, 1, 31));
    cfg.premium_threshold = 0.05;
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_TRUE(r.trade_log.empty());
}

TEST(Backtest, ConfigValidation) {
    const auto data = single(scripted_bars("FLAT", Date(2023, 11, 1), std::vector<double>(90, 100.0)));
    RuleEngine engine;
    auto cfg = base_config(Date(2024, 1, 16), Date(2024, 1, 31));
    cfg.position_limit = 1.5;
    EXPECT_THROW(run_backtest(cfg, data, engine), ConfigError);
    cfg = base_config(Date(2024, 1, 16), Date(2024, 1, 31));
    cfg.tickers = {"NOPE"};
    EXPECT_THROW(run_backtest(cfg, data, engine), ConfigError);
    cfg = base_config(Date(2023, 11, 1), Date(2024, 1, 31));
    EXPECT_THROW(run_backtest(cfg, data, engine), DataError);
    cfg = base_config(Date(2024, 1, 16), Date(2025, 1, 31));
    EXPECT_THROW(run_backtest(cfg, data, engine), DataError);
}

TEST(Backtest, InvariantsHoldOnGbmPaths) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto data = gbm_market(Date(2021, 1, 1), Date(2023, 12, 31), seed, 3);
        auto cfg = base_config(Date(2022, 1, 3), Date(2023, 12, 29));
        cfg.features.volatility_floor = 0.05;
        RuleEngine engine;
        const auto r = run_backtest(cfg, data, engine);
        EXPECT_LT(r.audit.max_accounting_error, 0.01) << seed;
        EXPECT_LT(replay_max_equity_error(r, cfg, data), 0.01) << seed;
        EXPECT_EQ(r.audit.collateral_violations, 0u);
        EXPECT_EQ(r.audit.adv_violations, 0u);
        EXPECT_EQ(r.audit.violations, 0u);
        EXPECT_EQ(count_trades(r.trade_log), r.counts);
        EXPECT_EQ(r.counts.trades() + r.counts.buy_to_close, r.trade_log.size());
        EXPECT_EQ(r.counts.buy_to_close, r.counts.puts_rolled);
        for (std::size_t i = 1; i < r.curve.dates.size(); ++i) EXPECT_LT(r.curve.dates[i - 1], r.curve.dates[i]);
    }
}

TEST(Backtest, CostsNeverIncreaseFinalEquity) {
    for (std::uint64_t seed : {4u, 5u, 6u}) {
        const auto data = gbm_market(Date(2021, 1, 1), Date(2022, 12, 30), seed, 2);
        auto cfg = base_config(Date(2022, 1, 3), Date(2022, 12, 30));
        RuleEngine a, b;
        const auto with = run_backtest(cfg, data, a);
        cfg.costs.enabled = false;
        const auto without = run_backtest(cfg, data, b);
        EXPECT_LE(with.final_equity, without.final_equity) << seed;
        EXPECT_EQ(without.commissions, 0.0);
    }
}

TEST(Backtest, ClosedChainsAreValidStoreRecords) {
    const auto data = gbm_market(Date(2021, 1, 1), Date(2022, 12, 30), 8, 2);
    auto cfg = base_config(Date(2022, 1, 3), Date(2022, 12, 30));
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    ASSERT_FALSE(r.closed_chains.empty());
    const auto schema = StoreSchema::defaults();
    for (const auto& rec : r.closed_chains) {
        EXPECT_NO_THROW(check_store_record(rec, schema)) << rec.id;
        EXPECT_EQ(rec.factors.size(), 27u) << rec.id;
        EXPECT_EQ(rec.id, trade_content_id(rec));
    }
    EXPECT_EQ(r.feedback.size(), r.closed_chains.size());
}

TEST(Backtest, TruncatedFutureDoesNotChangeThePast) {
    const auto full = gbm_market(Date(2021, 1, 1), Date(2023, 6, 30), 9, 2);
    const Date cut(2022, 9, 30);
    MarketData truncated;
    for (const auto& [t, s] : full) {
        BarSeries c = s;
        std::erase_if(c.bars, [&](const Bar& b) { return b.date > cut; });
        truncated.emplace(t, std::move(c));
    }
    auto cfg = base_config(Date(2022, 1, 3), cut);
    MockLlmClient llm_a(3), llm_b(3);
    BayesianEngine a(llm_a, {}), b(llm_b, {});
    const auto ra = run_backtest(cfg, full, a);
    const auto rb = run_backtest(cfg, truncated, b);
    EXPECT_EQ(trade_log_jsonl(ra.trade_log), trade_log_jsonl(rb.trade_log));
    EXPECT_EQ(ra.audit.violations, 0u);
}

TEST(Backtest, BayesianRunIsDeterministicAndFast) {
    const auto data = gbm_market(Date(2021, 1, 1), Date(2023, 12, 31), 21, 1);
    auto cfg = base_config(Date(2022, 1, 3), Date(2023, 12, 29));
    cfg.features.volatility_floor = 0.05;
    std::vector<std::string> logs;
    for (int run = 0; run < 3; ++run) {
        const auto t0 = std::chrono::steady_clock::now();
        MockLlmClient llm(77);
        BayesianEngine engine(llm, {});
        const auto r = run_backtest(cfg, data, engine);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        EXPECT_LT(secs, 10.0);
        EXPECT_EQ(r.audit.violations, 0u);
        EXPECT_GT(r.counts.puts_sold, 0u);
        EXPECT_EQ(r.audit.retrain_dates.size(), 4u);
        logs.push_back(trade_log_jsonl(r.trade_log));
    }
    EXPECT_EQ(logs[0], logs[1]);
    EXPECT_EQ(logs[1], logs[2]);
}

TEST(Backtest, BayesianEngineLearnsFromClosedChains) {
    const auto data = gbm_market(Date(2021, 1, 1), Date(2022, 12, 30), 22, 1);
    auto cfg = base_config(Date(2022, 1, 3), Date(2022, 12, 30));
    MockLlmClient llm(5);
    BayesianEngine engine(llm, {});
    const auto r = run_backtest(cfg, data, engine);
    EXPECT_EQ(engine.store().size(), r.closed_chains.size());
    EXPECT_EQ(engine.feedback().size(), r.closed_chains.size());
    EXPECT_EQ(engine.generations(), 2u);  // one ticker, two half-year periods
    EXPECT_GT(r.decision_factors_per_trade, 0.0);
    for (const auto& e : r.audit.entries) {
        EXPECT_LT(e.feature_date, e.decision_date);
        if (e.latest_record_date) EXPECT_LT(*e.latest_record_date, e.decision_date);
    }
}

TEST(Backtest, SummaryCarriesReportFields) {
    const auto data = gbm_market(Date(2021, 1, 1), Date(2022, 12, 30), 23, 1);
    auto cfg = base_config(Date(2022, 1, 3), Date(2022, 12, 30));
    RuleEngine engine;
    const auto r = run_backtest(cfg, data, engine);
    const auto j = summary_json(r);
    for (const char* key : {"Average Annual Return", "Final Portfolio Value", "Total Premium Collected",
                            "Number of Trades", "Trades per Year", "Average Premium/Trade", "Put Trades Sold",
                            "Puts Expired Worthless", "Puts Rolled", "Puts Assigned", "Average Premium Rate",
                            "Average Monthly Return", "Winning Years", "Decision Factors/Trade"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["Number of Trades"].get<std::size_t>(), r.counts.trades());
    EXPECT_DOUBLE_EQ(j["Puts Rolled"]["ratio_to_puts_sold"].get<double>(),
                     static_cast<double>(r.counts.puts_rolled) / static_cast<double>(r.counts.puts_sold));
}

// ---- walk-forward ----

TEST(WalkForward, HonorsBoundariesAndRetrainSchedule) {
    const auto data = gbm_market(Date(2020, 1, 1), Date(2022, 12, 30), 31, 3);
    WalkForwardConfig wf;
    wf.base.features.volatility_floor = 0.05;
    wf.train_start = Date(2020, 6, 1);
    wf.validate_start = Date(2021, 6, 1);
    wf.test_start = Date(2022, 1, 3);
    wf.end = Date(2022, 12, 30);
    wf.risk_aversion_grid = {0.5, 2.0};
    wf.jobs = 2;
    auto factory = [](double ra) -> std::unique_ptr<DecisionEngine> {
        struct Owned : BayesianEngine {
            std::unique_ptr<MockLlmClient> llm;
            Owned(std::unique_ptr<MockLlmClient> l, BayesianEngineConfig c)
                : BayesianEngine(*l, std::move(c)), llm(std::move(l)) {}
        };
        BayesianEngineConfig c;
        c.decision.risk_aversion = ra;
        return std::make_unique<Owned>(std::make_unique<MockLlmClient>(9), c);
    };
    const auto r = run_walk_forward(wf, data, factory);
    EXPECT_TRUE(r.audit.passed());
    EXPECT_EQ(r.audit.temporal_violations, 0u);
    ASSERT_EQ(r.segments.size(), 3u);
    EXPECT_EQ(r.segments[2].name, "test");
    EXPECT_EQ(r.segments[2].start, wf.test_start);
    EXPECT_EQ(r.audit.retrain_dates.size(), 6u);
    EXPECT_EQ(r.validation_scores.size(), 2u);
    const auto j = walk_forward_json(r);
    EXPECT_TRUE(j["audit"]["passed"].get<bool>());
}

TEST(WalkForward, RejectsUnorderedBoundaries) {
    const auto data = gbm_market(Date(2020, 1, 1), Date(2021, 12, 31), 1, 1);
    WalkForwardConfig wf;
    wf.train_start = Date(2021, 1, 4);
    wf.validate_start = Date(2020, 6, 1);
    wf.test_start = Date(2021, 6, 1);
    wf.end = Date(2021, 12, 31);
    EXPECT_THROW(run_walk_forward(wf, data, [](double) { return std::make_unique<RuleEngine>(); }), ConfigError);
}
