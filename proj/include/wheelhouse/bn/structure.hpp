#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wheelhouse::bn {

using Edge = std::pair<std::string, std::string>;  // (parent, child)

// Directed graph over named variables, as produced by structure generation.
// Carries no guarantees until validate_structure() says so.
struct NetworkStructure {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    std::string reasoning;

    friend bool operator==(const NetworkStructure&, const NetworkStructure&) = default;
};

enum class ViolationCode {
    missing_field,
    duplicate_node,
    unknown_endpoint,
    self_edge,
    duplicate_edge,
    cycle,
};

const char* to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string message;
    // For cycles: the witness path, first node repeated at the end (A, B, A).
    std::vector<std::string> path;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    std::string summary() const;
};

ValidationReport validate_structure(const NetworkStructure& structure);

// Kahn's algorithm with a lexicographic ready-queue, so the result is the
// lexicographically least topological order. Throws StructureError on
// invalid input.
std::vector<std::string> topological_order(const NetworkStructure& structure);

// Parents of `node`, sorted lexicographically.
std::vector<std::string> parents_of(const NetworkStructure& structure, const std::string& node);

}  // namespace wheelhouse::bn
