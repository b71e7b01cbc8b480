#include <gtest/gtest.h>

#include <sstream>

#include "test_files.hpp"
#include "test_networks.hpp"
#include "wheelhouse/bn/serialization.hpp"
#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/data_io.hpp"
#include "wheelhouse/error.hpp"

using namespace wheelhouse;
using namespace wheelhouse::test_support;

namespace {

const std::string kHeader = "date,open,high,low,close,adj_close,volume\n";

BarSeries parse(const std::string& text, const TradingCalendar& cal = {}) {
    std::istringstream in(text);
    return parse_bars(in, "T", "t.csv", cal);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

TradeRecord full_record(const std::string& regime = "Bull") {
    TradeRecord r;
    r.date = Date::parse("2020-05-01");
    r.ticker = "AAA";
    r.action = TradeAction::sell_put;
    r.strike = 95.0;
    r.premium = 1.25;
    r.contracts = 2;
    r.outcome = TradeOutcome::profit;
    for (const auto& v : bn::core_variables()) r.factors[v.name] = v.states[0];
    r.factors[bn::var::market_regime] = regime;
    return r;
}

}  // namespace

TEST(Bars, ThreeRows) {
    const auto s = parse(kHeader + "2021-01-04,10,11,9,10.5,10.5,1000\n2021-01-05,10.5,11,10,10.8,10.8,900\n"
                                   "2021-01-06,10.8,11.2,10.1,11,11,1100\n");
    ASSERT_EQ(s.bars.size(), 3u);
    EXPECT_DOUBLE_EQ(s.bars[2].close, 11.0);
    EXPECT_TRUE(s.missing_days.empty());
}

TEST(Bars, DuplicateDateNamed) {
    const auto msg = error_of(kHeader + "2021-01-04,10,11,9,10,10,1\n2021-01-04,10,11,9,10,10,1\n");
    EXPECT_NE(msg.find("duplicate date 2021-01-04"), std::string::npos) << msg;
    EXPECT_NE(msg.find("t.csv:3"), std::string::npos) << msg;
}

TEST(Bars, NegativeCloseCitesLine) {
    const auto msg = error_of(kHeader + "2021-01-04,10,11,9,10,10,1\n2021-01-05,10,11,9,-1,10,1\n");
    EXPECT_NE(msg.find("t.csv:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("close"), std::string::npos) << msg;
}

TEST(Bars, OtherRejections) {
    EXPECT_NE(error_of("Date,Open\n").find("header"), std::string::npos);
    EXPECT_NE(error_of(kHeader + "2021-01-04,10,11,9,10,10\n").find("expected 7"), std::string::npos);
    EXPECT_NE(error_of(kHeader + "2021-01-04,10,11,9,ten,10,1\n").find("not a number"), std::string::npos);
    EXPECT_NE(error_of(kHeader + "2021-01-05,10,11,9,10,10,1\n2021-01-04,10,11,9,10,10,1\n").find("precedes"),
              std::string::npos);
    EXPECT_NE(error_of(kHeader + "2021-01-04,10,11,9,10,10,-5\n").find("volume"), std::string::npos);
}

TEST(Bars, GapReportUsesCalendar) {
    const std::string text = kHeader + "2021-01-04,10,11,9,10,10,1\n2021-01-08,10,11,9,10,10,1\n";
    EXPECT_EQ(parse(text).missing_days.size(), 3u);
    TradingCalendar cal({Date::parse("2021-01-06")});
    EXPECT_EQ(parse(text, cal).missing_days,
              (std::vector<Date>{Date::parse("2021-01-05"), Date::parse("2021-01-07")}));
}

TEST(Bars, WriteLoadRoundTripAndLookup) {
    TempDir dir;
    BarSeries s{"ZZZ", {}, {}};
    s.bars.push_back({Date::parse("2021-01-04"), 10.1, 10.7, 9.9, 10.3, 10.25, 12345});
    s.bars.push_back({Date::parse("2021-01-06"), 0.1 + 0.2, 11, 10, 10.5, 10.5, 0});
    write_bars(dir / "ZZZ.csv", s);
    const auto back = load_bars(dir / "ZZZ.csv");
    EXPECT_EQ(back.ticker, "ZZZ");
    EXPECT_EQ(back.bars, s.bars);
    EXPECT_EQ(back.index_on_or_before(Date::parse("2021-01-05")), 0u);
    EXPECT_EQ(back.index_on_or_after(Date::parse("2021-01-05")), 1u);
    EXPECT_FALSE(back.index_on_or_before(Date::parse("2021-01-01")).has_value());
    EXPECT_FALSE(back.index_on_or_after(Date::parse("2021-01-07")).has_value());
}

TEST(TradeStoreFile, AppendGrowsByOneLine) {
    TempDir dir;
    const auto path = dir / "trades.jsonl";
    const auto id = append_trade(path, full_record());
    EXPECT_EQ(id.size(), 16u);
    EXPECT_EQ(line_count(path), 2u);  // header + record
    append_trade(path, full_record("Bear"));
    EXPECT_EQ(line_count(path), 3u);
}

TEST(TradeStoreFile, DuplicateAppendIsNoOp) {
    TempDir dir;
    const auto path = dir / "trades.jsonl";
    const auto a = append_trade(path, full_record());
    const auto b = append_trade(path, full_record());
    EXPECT_EQ(a, b);
    EXPECT_EQ(line_count(path), 2u);
}

TEST(TradeStoreFile, IdIsContentHashIgnoringGivenId) {
    auto r = full_record();
    r.id = "whatever";
    const auto id = trade_content_id(r);
    r.id = "other";
    EXPECT_EQ(trade_content_id(r), id);
    r.premium += 0.01;
    EXPECT_NE(trade_content_id(r), id);
}

TEST(TradeStoreFile, MissingRequiredFactorListed) {
    TempDir dir;
    auto r = full_record();
    r.factors.erase(bn::var::premium_rate);
    r.factors.erase(bn::var::trade_outcome);
    try {
        append_trade(dir / "t.jsonl", r);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.missing(), (std::vector<std::string>{bn::var::premium_rate, bn::var::trade_outcome}));
    }
    EXPECT_FALSE(std::filesystem::exists(dir / "t.jsonl"));
}

TEST(TradeStoreFile, ReadsBackNInAppendOrder) {
    TempDir dir;
    const auto path = dir / "trades.jsonl";
    TradeStoreWriter writer(path);
    std::vector<std::string> ids;
    for (int i = 0; i < 25; ++i) {
        auto r = full_record(i % 2 ? "Bull" : "Bear");
        r.date = Date::parse("2020-06-01") - i;  // deliberately descending
        r.strike = 90 + i;
        ids.push_back(writer.append(r));
    }
    const auto back = read_trade_log(path);
    ASSERT_EQ(back.size(), 25u);
    for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(back[i].id, ids[i]);
    EXPECT_EQ(back[3].strike, 93.0);
    EXPECT_EQ(back[3].outcome, TradeOutcome::profit);
    // Reopening sees the existing ids.
    TradeStoreWriter again(path);
    EXPECT_EQ(again.size(), 25u);
    const auto store = load_trade_store(path);
    EXPECT_EQ(store.records().front().date, Date::parse("2020-06-01") - 24);
}

TEST(TradeStoreFile, CorruptLineCitesLineNumber) {
    TempDir dir;
    const auto path = dir / "trades.jsonl";
    append_trade(path, full_record());
    std::ofstream(path, std::ios::app) << "{\"id\":\"x\"}\n";
    try {
        read_trade_log(path);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    write_file(dir / "nohdr.jsonl", trade_to_json(full_record()).dump() + "\n");
    EXPECT_THROW(read_trade_log(dir / "nohdr.jsonl"), DataError);
}

TEST(TradeStoreFile, SchemaManifestRoundTrip) {
    TempDir dir;
    const auto schema = StoreSchema::defaults();
    save_store_schema(dir / "schema.json", schema);
    const auto back = load_store_schema(dir / "schema.json");
    EXPECT_EQ(back.factors, schema.factors);
    EXPECT_EQ(back.required, schema.required);
    write_file(dir / "bad.json", R"({"version":1,"factors":[{"name":"A","states":["x","y"]}],"required":["B"]})");
    EXPECT_THROW(load_store_schema(dir / "bad.json"), SchemaError);
}

TEST(FeedbackLog, AppendAndLoad) {
    TempDir dir;
    FeedbackRecord r{"abc", Date::parse("2021-02-19"), "sell_put 10.0% OTM", TradeOutcome::loss,
                     {{"Volatility_Level", "High"}}, "lesson"};
    append_feedback(dir / "fb.jsonl", r);
    r.trade_id = "def";
    append_feedback(dir / "fb.jsonl", r);
    const auto back = load_feedback(dir / "fb.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].trade_id, "abc");
    EXPECT_EQ(back[1].outcome, TradeOutcome::loss);
    EXPECT_EQ(back[1].indicators.at("Volatility_Level"), "High");
    EXPECT_TRUE(load_feedback(dir / "absent.jsonl").empty());
}

TEST(Snapshot, RoundTripExact) {
    TempDir dir;
    auto rng = make_rng(5);
    for (int i = 0; i < 10; ++i) {
        const auto net = random_network(rng, 5);
        snapshot_network(net, {Date::parse("2021-03-01"), {"b", "a", "b"}, "llm", {}}, dir / "net.json");
        const auto snap = load_snapshot(dir / "net.json");
        EXPECT_EQ(snap.network, net);
        for (const auto& n : net.nodes())
            EXPECT_LE((snap.network.cpt(n).table() - net.cpt(n).table()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(snap.provenance.trade_ids, (std::vector<std::string>{"a", "b"}));
        EXPECT_EQ(snap.provenance.as_of, Date::parse("2021-03-01"));
        EXPECT_EQ(snap.provenance.structure_source, "llm");
    }
}

TEST(Snapshot, TamperedRowRejected) {
    TempDir dir;
    const auto net = assignment_decision_network();
    auto doc = snapshot_to_json(net, {Date::parse("2021-03-01"), {}, "predefined", {}});
    doc["cpts"]["Assignment_Probability"]["rows"][4][0] = 0.25;  // row now sums to 1.2
    write_file(dir / "bad.json", doc.dump());
    try {
        load_snapshot(dir / "bad.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos) << e.what();
    }
}

TEST(Manifest, RoundTrip) {
    TempDir dir;
    RunManifest m;
    m.command = "backtest";
    m.tool_version = "0.1.0";
    m.seed = 42;
    m.config = {{"strategy.put_otm", "0.10"}};
    m.inputs = {{"data/SPY.csv", "abc"}};
    m.started_at = utc_timestamp();
    write_manifest(dir / "manifest.json", m);
    const auto back = load_manifest(dir / "manifest.json");
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(back.inputs, m.inputs);
    EXPECT_EQ(back.status, "running");
    EXPECT_EQ(m.started_at.size(), 20u);
    EXPECT_EQ(m.started_at.back(), 'Z');
}
