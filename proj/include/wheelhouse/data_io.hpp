#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wheelhouse/bn/network.hpp"
#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/date.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse {

namespace fs = std::filesystem;

struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    double volume = 0.0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

struct BarSeries {
    std::string ticker;
    std::vector<Bar> bars;
    // Calendar trading days with no bar between the first and last bar.
    std::vector<Date> missing_days;

    // Index of the last bar dated on or before `d`.
    std::optional<std::size_t> index_on_or_before(Date d) const;
    // Index of the first bar dated on or after `d`.
    std::optional<std::size_t> index_on_or_after(Date d) const;
};

inline constexpr const char* kBarHeader = "date,open,high,low,close,adj_close,volume";

// Throws DataError citing the source and line number for a bad header,
// malformed row, non-positive price, negative volume, or a date that does not
// strictly increase.
BarSeries parse_bars(std::istream& in, std::string ticker, const std::string& source = "<stream>",
                     const TradingCalendar& calendar = {});
// Ticker defaults to the file stem.
BarSeries load_bars(const fs::path& path, std::string ticker = {}, const TradingCalendar& calendar = {});
// Header plus one line per bar, numbers in shortest round-trip form.
std::string bars_csv(const BarSeries& series);
void write_bars(const fs::path& path, const BarSeries& series);

// Atomic replace via a sibling temporary file.
void write_text_file(const fs::path& path, const std::string& content);
std::string read_text_file(const fs::path& path);

// ---- trade store (JSONL, first line is a schema header) ----

inline constexpr int kTradeStoreVersion = 1;

nlohmann::ordered_json trade_to_json(const TradeRecord& record);
TradeRecord trade_from_json(const nlohmann::json& doc);

// First 16 hex digits of SHA-256 over the record's canonical JSON without id.
std::string trade_content_id(const TradeRecord& record);

struct StoreSchema {
    FactorSchema factors = FactorSchema::defaults();
    // Factors every stored record must carry; defaults to the eight core variables.
    std::vector<std::string> required;

    static StoreSchema defaults();
};

// {"version": 1, "factors": [{"name": ..., "states": [...]}, ...], "required": [...]}
nlohmann::ordered_json store_schema_to_json(const StoreSchema& schema);
StoreSchema store_schema_from_json(const nlohmann::json& doc);
StoreSchema load_store_schema(const fs::path& path);
void save_store_schema(const fs::path& path, const StoreSchema& schema);

// Throws SchemaError listing every missing required factor, DataError for
// illegal values.
void check_store_record(const TradeRecord& record, const StoreSchema& schema);

// Single-writer handle. Appending a record whose content id is already
// present is a no-op that returns the same id.
class TradeStoreWriter {
public:
    TradeStoreWriter(fs::path path, StoreSchema schema = StoreSchema::defaults());

    std::string append(TradeRecord record);
    std::size_t size() const { return ids_.size(); }

private:
    fs::path path_;
    StoreSchema schema_;
    std::set<std::string> ids_;
};

std::string append_trade(const fs::path& path, const TradeRecord& record,
                         const StoreSchema& schema = StoreSchema::defaults());

// Records in append order. Missing file -> empty.
std::vector<TradeRecord> read_trade_log(const fs::path& path);
TradeStore load_trade_store(const fs::path& path, const StoreSchema& schema = StoreSchema::defaults());

// Header line plus one record per line, ids kept as given.
std::string trade_log_jsonl(const std::vector<TradeRecord>& records);

// ---- feedback log ----

nlohmann::ordered_json feedback_to_json(const FeedbackRecord& record);
FeedbackRecord feedback_from_json(const nlohmann::json& doc);
void append_feedback(const fs::path& path, const FeedbackRecord& record);
std::vector<FeedbackRecord> load_feedback(const fs::path& path);

// ---- network snapshots ----

struct SnapshotProvenance {
    Date as_of;
    std::vector<std::string> trade_ids;  // written sorted and deduplicated
    std::string structure_source;
    std::vector<std::string> diagnostics;
};

nlohmann::ordered_json snapshot_to_json(const bn::BayesianNetwork& network, const SnapshotProvenance& provenance);
void snapshot_network(const bn::BayesianNetwork& network, const SnapshotProvenance& provenance,
                      const fs::path& path);

struct Snapshot {
    bn::BayesianNetwork network;
    SnapshotProvenance provenance;
};

Snapshot load_snapshot(const fs::path& path);

// ---- run manifests ----

struct RunManifest {
    std::string command;
    std::string tool_version;
    std::optional<std::uint64_t> seed;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> inputs;  // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256, filled at the end
    std::string started_at;
    std::string finished_at;
    std::string status = "running";
};

std::string utc_timestamp();
nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& doc);
void write_manifest(const fs::path& path, const RunManifest& manifest);
RunManifest load_manifest(const fs::path& path);

}  // namespace wheelhouse
