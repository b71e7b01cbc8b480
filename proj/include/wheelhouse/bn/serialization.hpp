#pragma once

#include <json.hpp>

#include "wheelhouse/bn/network.hpp"

namespace wheelhouse::bn {

// {"nodes": [...], "edges": [[p, c], ...], "reasoning": "..."} in that key order.
nlohmann::ordered_json structure_to_json(const NetworkStructure& structure);

// Throws ParseError when required fields are absent or mistyped. Does not
// check graph validity.
NetworkStructure structure_from_json(const nlohmann::json& doc);

// Findings for a raw JSON document: missing-field plus every structural check.
ValidationReport validate_structure_json(const nlohmann::json& doc);

// Structure keys plus "variables" (name -> states) and "cpts"
// (child -> {"parents": [...], "rows": [[...], ...]}).
nlohmann::ordered_json network_to_json(const BayesianNetwork& network);

// Rebuilds and revalidates; errors cite the offending CPT row.
BayesianNetwork network_from_json(const nlohmann::json& doc);

}  // namespace wheelhouse::bn
