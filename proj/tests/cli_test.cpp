#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "test_files.hpp"
#include "test_oracles.hpp"
#include "wheelhouse/bn/serialization.hpp"
#include "wheelhouse/data_io.hpp"
#include "wheelhouse/hash.hpp"
#include "wheelhouse/structure_gen.hpp"

using namespace wheelhouse;
using wheelhouse::test_support::TempDir;
using wheelhouse::test_support::write_file;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = WHEELHOUSE_SOURCE_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "wheelhouse");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

json load(const fs::path& p) { return json::parse(read_text_file(p)); }

std::string context_json() {
    return R"({"ticker": "XYZ", "current_price": 100, "volatility": 0.45, "trend": "down", "vix": 32,
               "market_regime": "Bear", "avg_daily_volume": 5000000, "date": "2024-03-01"})";
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
    TempDir tmp;
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"validate", "--bogus", "x"}).code, 2);
    EXPECT_EQ(invoke({"backtest", "--config", (kRoot / "configs/flat_fixture.conf").string(), "--set", "no_such=1",
                   "--out", tmp.path().string()})
                  .code,
              2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, StochasticCommandsRequireSeed) {
    TempDir tmp;
    write_file(tmp / "ctx.json", context_json());
    const auto r = invoke({"generate", "--context", (tmp / "ctx.json").string(), "--out", (tmp / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--seed"), std::string::npos);
    EXPECT_FALSE(fs::exists(tmp / "o"));
}

TEST(Cli, LiveProviderRefusedWithoutKey) {
    TempDir tmp;
    ::unsetenv("WHEELHOUSE_LLM_KEY");
    write_file(tmp / "ctx.json", context_json());
    const auto r = invoke({"generate", "--context", (tmp / "ctx.json").string(), "--provider", "live", "--seed", "1",
                        "--out", (tmp / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("WHEELHOUSE_LLM_KEY"), std::string::npos);
}

TEST(Cli, ValidateNamesTheCycle) {
    TempDir tmp;
    write_file(tmp / "cyclic.json",
               R"({"nodes": ["A", "B", "C"], "edges": [["A", "B"], ["B", "C"], ["C", "A"]], "reasoning": ""})");
    const auto r = invoke({"validate", (tmp / "cyclic.json").string(), "--out", (tmp / "o").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("A -> B -> C -> A"), std::string::npos) << r.out;
    EXPECT_FALSE(load(tmp / "o/validation.json")["valid"].get<bool>());
    EXPECT_EQ(load(tmp / "o/manifest.json")["status"], "failed");

    write_file(tmp / "ok.json", bn::structure_to_json(predefined_structure(MarketRegime::bull)).dump());
    EXPECT_EQ(invoke({"validate", (tmp / "ok.json").string(), "--out", (tmp / "o2").string()}).code, 0);
}

TEST(Cli, GenerateIsByteIdenticalAcrossRuns) {
    TempDir tmp;
    write_file(tmp / "ctx.json", context_json());
    for (const char* o : {"a", "b"})
        ASSERT_EQ(invoke({"generate", "--context", (tmp / "ctx.json").string(), "--provider", "mock", "--seed", "7",
                       "--out", (tmp / o).string()})
                      .code,
                  0);
    for (const char* f : {"structure.json", "generation.json", "prompt.txt"})
        EXPECT_EQ(read_text_file(tmp / "a" / f), read_text_file(tmp / "b" / f)) << f;
    const auto structure = bn::structure_from_json(load(tmp / "a/structure.json"));
    EXPECT_TRUE(bn::validate_structure(structure).valid());
}

TEST(Cli, ManifestComesFirstAndCoversEveryOutput) {
    TempDir tmp;
    write_file(tmp / "ctx.json", context_json());
    ASSERT_EQ(invoke({"generate", "--context", (tmp / "ctx.json").string(), "--seed", "3", "--out",
                   (tmp / "o").string()})
                  .code,
              0);
    const auto m = manifest_from_json(load(tmp / "o/manifest.json"));
    EXPECT_EQ(m.status, "ok");
    EXPECT_EQ(m.seed, 3u);
    EXPECT_EQ(m.inputs.at((tmp / "ctx.json").generic_string()), sha256_hex(read_text_file(tmp / "ctx.json")));
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(tmp / "o")) {
        if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
        ++files;
        const auto rel = fs::relative(e.path(), tmp / "o").generic_string();
        ASSERT_TRUE(m.outputs.contains(rel)) << rel;
        EXPECT_EQ(m.outputs.at(rel), sha256_hex(read_text_file(e.path())));
    }
    EXPECT_EQ(files, m.outputs.size());
}

TEST(Cli, FlatFixtureBacktestMatchesHandLedger) {
    TempDir tmp;
    const auto r = invoke({"backtest", "--config", (kRoot / "configs/flat_fixture.conf").string(), "--set",
                        "data=" + (kRoot / "data/fixtures/flat").string(), "--out", tmp.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    // Strike 90, 31 days to the third Friday, one contract, minimum commission.
    const double gross = 100.0 * test_support::quadrature_price(100.0, 90.0, 0.30, 31.0 / 365.0, 0.0,
                                                                sim::OptionType::put);
    const double net = gross - 1.00 - 0.0015 * gross;
    const auto summary = load(tmp / "summary.json");
    EXPECT_NEAR(summary["Final Portfolio Value"].get<double>(), 100000.0 + net, 1e-6);
    EXPECT_EQ(summary["Put Trades Sold"].get<int>(), 1);
    EXPECT_EQ(load(tmp / "audit.json")["look_ahead_violations"].get<int>(), 0);
}

TEST(Cli, FlagsOverrideConfigFile) {
    TempDir tmp;
    const auto conf = (kRoot / "configs/flat_fixture.conf").string();
    const auto data = "data=" + (kRoot / "data/fixtures/flat").string();
    ASSERT_EQ(invoke({"backtest", "--config", conf, "--set", data, "--set", "initial_capital=50000", "--end",
                   "2024-01-31", "--out", tmp.path().string()})
                  .code,
              0);
    const auto cfg = load(tmp / "config.json");
    EXPECT_EQ(cfg["initial_capital"].get<double>(), 50000.0);
    EXPECT_EQ(cfg["end"], "2024-01-31");
    EXPECT_EQ(cfg["cycle"], "monthly");
}

TEST(Cli, PipelineFromBacktestThroughInference) {
    TempDir tmp;
    const auto data = (kRoot / "data/synthetic").string();
    ASSERT_EQ(invoke({"backtest", "--data", data, "--tickers", "AAA,BBB", "--start", "2010-01-04", "--end",
                   "2011-12-30", "--engine", "rule", "--seed", "5", "--out", (tmp / "bt").string()})
                  .code,
              0);
    const auto ingest = invoke({"ingest", "trades", (tmp / "bt/chains.jsonl").string(), (tmp / "bt/chains.jsonl").string(),
                             "--out", (tmp / "store").string()});
    ASSERT_EQ(ingest.code, 0) << ingest.err;
    const auto ing = load(tmp / "store/ingest.json");
    EXPECT_EQ(ing["records_read"].get<int>(), 2 * ing["records_stored"].get<int>());
    EXPECT_GT(ing["records_stored"].get<int>(), 10);

    write_file(tmp / "ctx.json", R"({"ticker": "AAA", "current_price": 60, "volatility": 0.3, "trend": "up",
        "vix": 20, "market_regime": "Neutral", "avg_daily_volume": 4000000, "date": "2012-01-03"})");
    write_file(tmp / "s.json", bn::structure_to_json(predefined_structure(MarketRegime::neutral)).dump());
    const auto pop = invoke({"populate", "--structure", (tmp / "s.json").string(), "--store",
                          (tmp / "store/store.jsonl").string(), "--context", (tmp / "ctx.json").string(), "--out",
                          (tmp / "net").string()});
    ASSERT_EQ(pop.code, 0) << pop.err;
    const auto snap = load_snapshot(tmp / "net/network.json");
    EXPECT_FALSE(snap.provenance.trade_ids.empty());

    const auto inf = invoke({"infer", "--network", (tmp / "net/network.json").string(), "--evidence",
                          "Market_Regime=Neutral", "--evidence", "Volatility_Level=Medium", "--json", "--out",
                          (tmp / "inf").string()});
    ASSERT_EQ(inf.code, 0) << inf.err;
    const auto decision = json::parse(inf.out);
    EXPECT_TRUE(decision.contains("explanation"));
    EXPECT_EQ(load(tmp / "inf/decision.json"), decision);

    const auto text = invoke({"infer", "--network", (tmp / "net/network.json").string(), "--evidence",
                           "Market_Regime=Bear", "--out", (tmp / "inf2").string()});
    EXPECT_EQ(text.code, 0);
    EXPECT_EQ(text.out, load(tmp / "inf2/decision.json")["explanation"].get<std::string>() +
                            (text.out.ends_with("\n\n") ? "\n" : ""));

    const auto bad = invoke({"infer", "--network", (tmp / "net/network.json").string(), "--evidence",
                          "Market_Regime=Sideways", "--out", (tmp / "inf3").string()});
    EXPECT_EQ(bad.code, 1);

    const auto rep = invoke({"report", "--input", (tmp / "bt").string(), "--out", (tmp / "rep").string()});
    ASSERT_EQ(rep.code, 0) << rep.err;
    EXPECT_NE(rep.out.find("Final Portfolio Value"), std::string::npos);
    EXPECT_TRUE(fs::exists(tmp / "rep/report_summary.csv"));
}

TEST(Cli, IngestBarsRejectsBadRows) {
    TempDir tmp;
    write_file(tmp / "BAD.csv", "date,open,high,low,close,adj_close,volume\n2024-01-02,1,1,1,1,1,10\n"
                                "2024-01-03,1,1,1,-1,1,10\n");
    const auto r = invoke({"ingest", "bars", (tmp / "BAD.csv").string(), "--out", (tmp / "o").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("3"), std::string::npos);
    const auto ok = invoke({"ingest", "bars", (kRoot / "data/fixtures/flat/FLAT.csv").string(), "--out",
                         (tmp / "o2").string()});
    ASSERT_EQ(ok.code, 0);
    EXPECT_EQ(read_text_file(tmp / "o2/bars/FLAT.csv"), read_text_file(kRoot / "data/fixtures/flat/FLAT.csv"));
}

TEST(Cli, AnalyzeConsistencyAndAblation) {
    TempDir tmp;
    ASSERT_EQ(invoke({"analyze", "consistency", "--seed", "2", "--set", "analysis.variations=3", "--set",
                   "llm.variation=0", "--jobs", "2", "--out", (tmp / "c").string()})
                  .code,
              0);
    const auto c = load(tmp / "c/consistency.json");
    EXPECT_DOUBLE_EQ(c["table"][0]["Mean"].get<double>(), 1.0);
    EXPECT_TRUE(fs::exists(tmp / "c/reliability.csv"));

    const auto a = invoke({"analyze", "ablation", "--seed", "2", "--data", (kRoot / "data/synthetic").string(),
                        "--tickers", "AAA", "--start", "2012-01-03", "--end", "2012-12-31", "--set",
                        "analysis.random_candidates=2", "--out", (tmp / "a").string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("input parity verified"), std::string::npos);
    const auto rep = invoke({"report", "--input", (tmp / "a").string(), "--out", (tmp / "r").string()});
    EXPECT_EQ(rep.code, 0);
    EXPECT_NE(rep.out.find("Random Structure"), std::string::npos);
}

TEST(BundledData, FactorSchemaMatchesDefaults) {
    const auto bundled = load_store_schema(kRoot / "data/factor_schema.json");
    EXPECT_EQ(store_schema_to_json(bundled), store_schema_to_json(StoreSchema::defaults()));
}

TEST(BundledData, SyntheticBarsRegenerate) {
    TempDir tmp;
    const auto r = invoke({"synth", "--seed", "2007", "--tickers", "AAA,BBB,CCC", "--start", "2006-01-02", "--end",
                           "2025-09-30", "--out", (tmp / "s").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* t : {"AAA", "BBB", "CCC"}) {
        const std::string name = std::string(t) + ".csv";
        EXPECT_EQ(read_text_file(tmp / "s/data" / name), read_text_file(kRoot / "data/synthetic" / name)) << t;
    }
}
