#include "wheelhouse/bn/serialization.hpp"

#include <sstream>

#include "wheelhouse/error.hpp"

namespace wheelhouse::bn {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json structure_to_json(const NetworkStructure& structure) {
    ordered_json doc;
    doc["nodes"] = structure.nodes;
    ordered_json edges = ordered_json::array();
    for (const auto& [from, to] : structure.edges) edges.push_back({from, to});
    doc["edges"] = std::move(edges);
    doc["reasoning"] = structure.reasoning;
    return doc;
}

namespace {

std::vector<std::string> shape_findings(const json& doc) {
    std::vector<std::string> findings;
    if (!doc.is_object()) return {"document is not a JSON object"};
    if (!doc.contains("nodes")) findings.push_back("missing field 'nodes'");
    else if (!doc["nodes"].is_array()) findings.push_back("'nodes' is not an array");
    else
        for (const auto& n : doc["nodes"])
            if (!n.is_string()) {
                findings.push_back("'nodes' contains a non-string entry");
                break;
            }
    if (!doc.contains("edges")) findings.push_back("missing field 'edges'");
    else if (!doc["edges"].is_array()) findings.push_back("'edges' is not an array");
    else
        for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
            const auto& e = doc["edges"][i];
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
                findings.push_back("edge " + std::to_string(i) + " is not a [parent, child] pair");
                break;
            }
        }
    if (doc.contains("reasoning") && !doc["reasoning"].is_string())
        findings.push_back("'reasoning' is not a string");
    return findings;
}

}  // namespace

NetworkStructure structure_from_json(const json& doc) {
    if (auto findings = shape_findings(doc); !findings.empty())
        throw ParseError("malformed structure document", std::move(findings));
    NetworkStructure s;
    s.nodes = doc["nodes"].get<std::vector<std::string>>();
    for (const auto& e : doc["edges"]) s.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    if (doc.contains("reasoning")) s.reasoning = doc["reasoning"].get<std::string>();
    return s;
}

ValidationReport validate_structure_json(const json& doc) {
    auto findings = shape_findings(doc);
    if (!findings.empty()) {
        ValidationReport report;
        for (auto& f : findings) report.violations.push_back({ViolationCode::missing_field, std::move(f), {}});
        return report;
    }
    return validate_structure(structure_from_json(doc));
}

ordered_json network_to_json(const BayesianNetwork& network) {
    ordered_json doc = structure_to_json(network.structure());
    ordered_json vars = ordered_json::object();
    for (const auto& n : network.nodes()) vars[n] = network.variable(n).states;
    doc["variables"] = std::move(vars);
    ordered_json cpts = ordered_json::object();
    for (const auto& n : network.nodes()) {
        const auto& cpt = network.cpt(n);
        ordered_json rows = ordered_json::array();
        for (Eigen::Index r = 0; r < cpt.table().rows(); ++r) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index c = 0; c < cpt.table().cols(); ++c) row.push_back(cpt.table()(r, c));
            rows.push_back(std::move(row));
        }
        cpts[n] = {{"parents", cpt.parents()}, {"rows", std::move(rows)}};
    }
    doc["cpts"] = std::move(cpts);
    return doc;
}

BayesianNetwork network_from_json(const json& doc) {
    NetworkStructure structure = structure_from_json(doc);
    if (!doc.contains("variables") || !doc["variables"].is_object())
        throw ParseError("network document lacks 'variables'", {"missing field 'variables'"});
    if (!doc.contains("cpts") || !doc["cpts"].is_object())
        throw ParseError("network document lacks 'cpts'", {"missing field 'cpts'"});

    std::vector<Variable> variables;
    std::map<std::string, std::size_t> cards;
    for (const auto& node : structure.nodes) {
        if (!doc["variables"].contains(node))
            throw ParseError("no states for node " + node, {"missing variable " + node});
        Variable v{node, doc["variables"][node].get<std::vector<std::string>>()};
        cards[node] = v.cardinality();
        variables.push_back(std::move(v));
    }

    std::vector<Cpt> cpts;
    for (const auto& node : structure.nodes) {
        if (!doc["cpts"].contains(node))
            throw ParseError("no CPT for node " + node, {"missing cpt " + node});
        const auto& entry = doc["cpts"][node];
        auto parents = entry.at("parents").get<std::vector<std::string>>();
        std::vector<std::size_t> parent_cards;
        for (const auto& p : parents) {
            auto it = cards.find(p);
            if (it == cards.end()) throw ParseError("CPT for " + node + " names unknown parent " + p, {});
            parent_cards.push_back(it->second);
        }
        const auto& rows = entry.at("rows");
        const auto child_card = cards[node];
        Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(child_card));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].is_array() || rows[r].size() != child_card)
                throw ParseError("CPT for " + node + " row " + std::to_string(r) + " has wrong width", {});
            for (std::size_t c = 0; c < child_card; ++c)
                table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
        }
        cpts.emplace_back(node, child_card, std::move(parents), std::move(parent_cards), std::move(table));
    }
    return BayesianNetwork::create(std::move(variables), std::move(structure), std::move(cpts));
}

}  // namespace wheelhouse::bn
