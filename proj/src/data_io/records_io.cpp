#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "wheelhouse/bn/serialization.hpp"
#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/data_io.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/hash.hpp"

namespace wheelhouse {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kTradeSchemaName = "wheelhouse.trades";
constexpr const char* kFeedbackSchemaName = "wheelhouse.feedback";
constexpr int kFeedbackVersion = 1;

ordered_json header(const char* name, int version) {
    ordered_json h;
    h["schema"] = name;
    h["version"] = version;
    return h;
}

// Parsed body lines of a JSONL file whose first line is the schema header.
std::vector<std::pair<std::size_t, json>> read_jsonl(const fs::path& path, const char* schema, int version) {
    std::vector<std::pair<std::size_t, json>> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto doc = json::parse(line, nullptr, false);
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (doc.is_discarded()) throw DataError(where + ": not valid JSON");
        if (!saw_header) {
            if (!doc.is_object() || doc.value("schema", "") != schema)
                throw DataError(where + ": missing '" + std::string(schema) + "' header line");
            if (doc.value("version", 0) != version)
                throw DataError(where + ": unsupported version " + doc.value("version", json()).dump());
            saw_header = true;
            continue;
        }
        out.emplace_back(line_no, std::move(doc));
    }
    return out;
}

void append_line(const fs::path& path, const char* schema, int version, const std::string& line) {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    if (fresh && path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw DataError("cannot append to " + path.string());
    if (fresh) out << header(schema, version).dump() << "\n";
    out << line << "\n";
    if (!out.flush()) throw DataError("append failed for " + path.string());
}

template <class F>
auto at_line(const fs::path& path, std::size_t line_no, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DomainError& e) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
}

}  // namespace

ordered_json trade_to_json(const TradeRecord& r) {
    ordered_json doc;
    doc["id"] = r.id;
    doc["date"] = r.date.to_string();
    doc["ticker"] = r.ticker;
    doc["action"] = to_string(r.action);
    doc["strike"] = r.strike;
    doc["premium"] = r.premium;
    doc["contracts"] = r.contracts;
    doc["outcome"] = r.outcome ? ordered_json(to_string(*r.outcome)) : ordered_json(nullptr);
    doc["factors"] = ordered_json::object();
    for (const auto& [k, v] : r.factors) doc["factors"][k] = v;
    doc["commission"] = r.commission;
    doc["slippage"] = r.slippage;
    doc["cash_flow"] = r.cash_flow;
    if (!r.option_type.empty()) doc["option_type"] = r.option_type;
    return doc;
}

TradeRecord trade_from_json(const json& doc) {
    TradeRecord r;
    r.id = doc.at("id").get<std::string>();
    r.date = Date::parse(doc.at("date").get<std::string>());
    r.ticker = doc.at("ticker").get<std::string>();
    r.action = parse_trade_action(doc.at("action").get<std::string>());
    r.strike = doc.at("strike").get<double>();
    r.premium = doc.at("premium").get<double>();
    r.contracts = doc.at("contracts").get<int>();
    if (doc.contains("outcome") && !doc["outcome"].is_null())
        r.outcome = parse_outcome(doc["outcome"].get<std::string>());
    for (const auto& [k, v] : doc.at("factors").items()) r.factors[k] = v.get<std::string>();
    r.commission = doc.value("commission", 0.0);
    r.slippage = doc.value("slippage", 0.0);
    r.cash_flow = doc.value("cash_flow", 0.0);
    r.option_type = doc.value("option_type", std::string{});
    if (!r.option_type.empty() && r.option_type != "put" && r.option_type != "call")
        throw DataError("option_type must be put or call");
    return r;
}

std::string trade_content_id(const TradeRecord& record) {
    auto doc = trade_to_json(record);
    doc.erase("id");
    return sha256_hex(doc.dump()).substr(0, 16);
}

StoreSchema StoreSchema::defaults() {
    StoreSchema s;
    for (const auto& v : bn::core_variables()) s.required.push_back(v.name);
    return s;
}

ordered_json store_schema_to_json(const StoreSchema& schema) {
    ordered_json doc;
    doc["version"] = 1;
    doc["factors"] = ordered_json::array();
    for (const auto& v : schema.factors.variables()) {
        ordered_json f;
        f["name"] = v.name;
        f["states"] = v.states;
        doc["factors"].push_back(std::move(f));
    }
    doc["required"] = schema.required;
    return doc;
}

StoreSchema store_schema_from_json(const json& doc) {
    try {
        if (doc.at("version").get<int>() != 1) throw SchemaError("unsupported factor schema version");
        std::vector<bn::Variable> vars;
        for (const auto& f : doc.at("factors"))
            vars.push_back({f.at("name").get<std::string>(), f.at("states").get<std::vector<std::string>>()});
        StoreSchema s;
        s.factors = FactorSchema(std::move(vars));
        s.required = doc.value("required", std::vector<std::string>{});
        std::vector<std::string> unknown;
        for (const auto& r : s.required)
            if (!s.factors.contains(r)) unknown.push_back(r);
        if (!unknown.empty()) throw SchemaError("required factor(s) not declared in schema", unknown);
        return s;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed factor schema: ") + e.what());
    } catch (const StructureError& e) {
        throw SchemaError(std::string("malformed factor schema: ") + e.what());
    }
}

StoreSchema load_store_schema(const fs::path& path) {
    const auto doc = json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded()) throw SchemaError(path.string() + ": not valid JSON");
    return store_schema_from_json(doc);
}

void save_store_schema(const fs::path& path, const StoreSchema& schema) {
    write_text_file(path, store_schema_to_json(schema).dump(2) + "\n");
}

void check_store_record(const TradeRecord& record, const StoreSchema& schema) {
    std::vector<std::string> missing;
    for (const auto& name : schema.required)
        if (!record.factors.count(name)) missing.push_back(name);
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw SchemaError("trade record lacks required factor(s): " + list, missing);
    }
    auto copy = record;
    if (copy.id.empty()) copy.id = "pending";
    check_record(copy, schema.factors);
}

TradeStoreWriter::TradeStoreWriter(fs::path path, StoreSchema schema)
    : path_(std::move(path)), schema_(std::move(schema)) {
    for (const auto& r : read_trade_log(path_)) ids_.insert(r.id);
}

std::string TradeStoreWriter::append(TradeRecord record) {
    check_store_record(record, schema_);
    record.id = trade_content_id(record);
    if (ids_.count(record.id)) return record.id;
    append_line(path_, kTradeSchemaName, kTradeStoreVersion, trade_to_json(record).dump());
    ids_.insert(record.id);
    return record.id;
}

std::string append_trade(const fs::path& path, const TradeRecord& record, const StoreSchema& schema) {
    TradeStoreWriter writer(path, schema);
    return writer.append(record);
}

std::vector<TradeRecord> read_trade_log(const fs::path& path) {
    std::vector<TradeRecord> out;
    for (const auto& [line_no, doc] : read_jsonl(path, kTradeSchemaName, kTradeStoreVersion))
        out.push_back(at_line(path, line_no, [&] { return trade_from_json(doc); }));
    return out;
}

TradeStore load_trade_store(const fs::path& path, const StoreSchema& schema) {
    auto records = read_trade_log(path);
    for (const auto& r : records) check_record(r, schema.factors);
    return TradeStore(std::move(records));
}

std::string trade_log_jsonl(const std::vector<TradeRecord>& records) {
    std::string out = header(kTradeSchemaName, kTradeStoreVersion).dump() + "\n";
    for (const auto& r : records) out += trade_to_json(r).dump() + "\n";
    return out;
}

ordered_json feedback_to_json(const FeedbackRecord& r) {
    ordered_json doc;
    doc["trade_id"] = r.trade_id;
    doc["date"] = r.date.to_string();
    doc["decision"] = r.decision_summary;
    doc["outcome"] = to_string(r.outcome);
    doc["indicators"] = ordered_json::object();
    for (const auto& [k, v] : r.indicators) doc["indicators"][k] = v;
    doc["lesson"] = r.lesson;
    return doc;
}

FeedbackRecord feedback_from_json(const json& doc) {
    FeedbackRecord r;
    r.trade_id = doc.at("trade_id").get<std::string>();
    r.date = Date::parse(doc.at("date").get<std::string>());
    r.decision_summary = doc.at("decision").get<std::string>();
    r.outcome = parse_outcome(doc.at("outcome").get<std::string>());
    for (const auto& [k, v] : doc.at("indicators").items()) r.indicators[k] = v.get<std::string>();
    r.lesson = doc.value("lesson", "");
    return r;
}

void append_feedback(const fs::path& path, const FeedbackRecord& record) {
    append_line(path, kFeedbackSchemaName, kFeedbackVersion, feedback_to_json(record).dump());
}

std::vector<FeedbackRecord> load_feedback(const fs::path& path) {
    std::vector<FeedbackRecord> out;
    for (const auto& [line_no, doc] : read_jsonl(path, kFeedbackSchemaName, kFeedbackVersion))
        out.push_back(at_line(path, line_no, [&] { return feedback_from_json(doc); }));
    return out;
}

ordered_json snapshot_to_json(const bn::BayesianNetwork& network, const SnapshotProvenance& p) {
    auto doc = bn::network_to_json(network);
    std::vector<std::string> ids = p.trade_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ordered_json prov;
    prov["as_of"] = p.as_of.to_string();
    prov["structure_source"] = p.structure_source;
    prov["trade_ids"] = ids;
    prov["diagnostics"] = p.diagnostics;
    doc["provenance"] = std::move(prov);
    return doc;
}

void snapshot_network(const bn::BayesianNetwork& network, const SnapshotProvenance& provenance,
                      const fs::path& path) {
    write_text_file(path, snapshot_to_json(network, provenance).dump(2) + "\n");
}

Snapshot load_snapshot(const fs::path& path) {
    const auto doc = json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw DataError(path.string() + ": not a JSON object");
    SnapshotProvenance p;
    try {
        if (doc.contains("provenance")) {
            const auto& prov = doc["provenance"];
            p.as_of = Date::parse(prov.at("as_of").get<std::string>());
            p.structure_source = prov.value("structure_source", "");
            p.trade_ids = prov.value("trade_ids", std::vector<std::string>{});
            p.diagnostics = prov.value("diagnostics", std::vector<std::string>{});
        }
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": bad provenance block: " + e.what());
    }
    return {bn::network_from_json(doc), std::move(p)};
}

std::string utc_timestamp() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const auto day = std::chrono::floor<std::chrono::days>(now);
    const std::chrono::hh_mm_ss hms{now - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", Date(day).to_string().c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

ordered_json manifest_to_json(const RunManifest& m) {
    ordered_json doc;
    doc["command"] = m.command;
    doc["tool_version"] = m.tool_version;
    doc["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
    doc["config"] = ordered_json::object();
    for (const auto& [k, v] : m.config) doc["config"][k] = v;
    doc["inputs"] = ordered_json::object();
    for (const auto& [k, v] : m.inputs) doc["inputs"][k] = v;
    doc["outputs"] = ordered_json::object();
    for (const auto& [k, v] : m.outputs) doc["outputs"][k] = v;
    doc["started_at"] = m.started_at;
    doc["finished_at"] = m.finished_at;
    doc["status"] = m.status;
    return doc;
}

RunManifest manifest_from_json(const json& doc) {
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.tool_version = doc.at("tool_version").get<std::string>();
    if (!doc.at("seed").is_null()) m.seed = doc["seed"].get<std::uint64_t>();
    m.config = doc.at("config").get<std::map<std::string, std::string>>();
    m.inputs = doc.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = doc.at("outputs").get<std::map<std::string, std::string>>();
    m.started_at = doc.value("started_at", "");
    m.finished_at = doc.value("finished_at", "");
    m.status = doc.value("status", "");
    return m;
}

void write_manifest(const fs::path& path, const RunManifest& manifest) {
    write_text_file(path, manifest_to_json(manifest).dump(2) + "\n");
}

RunManifest load_manifest(const fs::path& path) {
    const auto doc = json::parse(read_text_file(path), nullptr, false);
    if (doc.is_discarded()) throw DataError(path.string() + ": not valid JSON");
    try {
        return manifest_from_json(doc);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": bad manifest: " + e.what());
    }
}

}  // namespace wheelhouse
