#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wheelhouse/bn/cpt.hpp"
#include "wheelhouse/bn/structure.hpp"

namespace wheelhouse::bn {

struct Variable {
    std::string name;
    std::vector<std::string> states;

    std::size_t cardinality() const { return states.size(); }
    // Throws DomainError for an unknown label.
    std::size_t state_index(std::string_view state) const;

    friend bool operator==(const Variable&, const Variable&) = default;
};

// Throws StructureError: empty name, fewer than two states, duplicate labels.
void check_variable(const Variable& variable);

using Assignment = std::map<std::string, std::string>;

// A validated discrete Bayesian network. Immutable once created.
class BayesianNetwork {
public:
    // Throws StructureError unless: structure valid, one variable and one CPT
    // per node, every CPT's parents and cardinalities match the structure.
    static BayesianNetwork create(std::vector<Variable> variables, NetworkStructure structure,
                                  std::vector<Cpt> cpts);

    const NetworkStructure& structure() const { return structure_; }
    const std::vector<std::string>& nodes() const { return structure_.nodes; }
    const std::vector<std::string>& topological_order() const { return topo_order_; }
    const Variable& variable(std::string_view name) const;
    const Cpt& cpt(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::size_t size() const { return structure_.nodes.size(); }

    friend bool operator==(const BayesianNetwork& a, const BayesianNetwork& b) {
        return a.structure_ == b.structure_ && a.variables_ == b.variables_ && a.cpts_ == b.cpts_;
    }

private:
    BayesianNetwork() = default;

    NetworkStructure structure_;
    std::vector<std::string> topo_order_;
    std::map<std::string, Variable, std::less<>> variables_;
    std::map<std::string, Cpt, std::less<>> cpts_;
};

// Chain-rule product of CPT entries. Throws DomainError when a node is
// missing from the assignment or a state label is unknown.
double joint_probability(const BayesianNetwork& network, const Assignment& assignment);

}  // namespace wheelhouse::bn
