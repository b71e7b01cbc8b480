#include "wheelhouse/bn/network.hpp"

#include <set>

#include "wheelhouse/error.hpp"

namespace wheelhouse::bn {

std::size_t Variable::state_index(std::string_view state) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == state) return i;
    throw DomainError("variable " + name + " has no state '" + std::string(state) + "'");
}

void check_variable(const Variable& variable) {
    if (variable.name.empty()) throw StructureError("variable with empty name");
    if (variable.states.size() < 2)
        throw StructureError("variable " + variable.name + " needs at least two states");
    std::set<std::string> labels;
    for (const auto& s : variable.states) {
        if (s.empty()) throw StructureError("variable " + variable.name + " has an empty state label");
        if (!labels.insert(s).second)
            throw StructureError("variable " + variable.name + " repeats state " + s);
    }
}

BayesianNetwork BayesianNetwork::create(std::vector<Variable> variables, NetworkStructure structure,
                                        std::vector<Cpt> cpts) {
    if (auto report = validate_structure(structure); !report.valid())
        throw StructureError("invalid structure: " + report.summary());

    BayesianNetwork net;
    for (auto& v : variables) {
        check_variable(v);
        std::string name = v.name;
        if (!net.variables_.emplace(name, std::move(v)).second)
            throw StructureError("variable " + name + " defined twice");
    }
    for (auto& c : cpts) {
        std::string name = c.child();
        if (!net.cpts_.emplace(name, std::move(c)).second)
            throw StructureError("two CPTs for " + name);
    }

    for (const auto& node : structure.nodes) {
        auto var = net.variables_.find(node);
        if (var == net.variables_.end()) throw StructureError("no variable for node " + node);
        auto cpt = net.cpts_.find(node);
        if (cpt == net.cpts_.end()) throw StructureError("no CPT for node " + node);
        const auto parents = parents_of(structure, node);
        if (cpt->second.parents() != parents)
            throw StructureError("CPT parents of " + node + " do not match the structure");
        if (cpt->second.child_cardinality() != var->second.cardinality())
            throw StructureError("CPT for " + node + " has wrong child cardinality");
        for (std::size_t i = 0; i < parents.size(); ++i) {
            const auto& pv = net.variables_.find(parents[i]);
            if (pv->second.cardinality() != cpt->second.parent_cardinalities()[i])
                throw StructureError("CPT for " + node + " has wrong cardinality for parent " +
                                     parents[i]);
        }
    }
    if (net.variables_.size() != structure.nodes.size())
        throw StructureError("variables defined for nodes outside the structure");
    if (net.cpts_.size() != structure.nodes.size())
        throw StructureError("CPTs defined for nodes outside the structure");

    net.topo_order_ = bn::topological_order(structure);
    net.structure_ = std::move(structure);
    return net;
}

const Variable& BayesianNetwork::variable(std::string_view name) const {
    auto it = variables_.find(name);
    if (it == variables_.end()) throw DomainError("unknown variable " + std::string(name));
    return it->second;
}

const Cpt& BayesianNetwork::cpt(std::string_view name) const {
    auto it = cpts_.find(name);
    if (it == cpts_.end()) throw DomainError("unknown variable " + std::string(name));
    return it->second;
}

bool BayesianNetwork::contains(std::string_view name) const {
    return variables_.find(name) != variables_.end();
}

double joint_probability(const BayesianNetwork& network, const Assignment& assignment) {
    double p = 1.0;
    std::vector<std::size_t> parent_states;
    for (const auto& node : network.nodes()) {
        auto it = assignment.find(node);
        if (it == assignment.end()) throw DomainError("assignment is missing node " + node);
        const auto& cpt = network.cpt(node);
        parent_states.clear();
        for (const auto& parent : cpt.parents()) {
            auto pit = assignment.find(parent);
            parent_states.push_back(network.variable(parent).state_index(pit->second));
        }
        p *= cpt.probability(network.variable(node).state_index(it->second), parent_states);
    }
    return p;
}

}  // namespace wheelhouse::bn
