#include <algorithm>
#include <map>
#include <set>

#include "factor.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/inference.hpp"

namespace wheelhouse::inference {

using detail::Factor;

double Posterior::probability(std::string_view state) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == state) return probabilities[static_cast<Eigen::Index>(i)];
    throw DomainError("posterior over " + variable + " has no state '" + std::string(state) + "'");
}

namespace {

struct Problem {
    std::vector<std::string> names;  // variable id -> name, sorted
    std::map<int, std::size_t> observed;
    int query = -1;
};

Problem prepare(const bn::BayesianNetwork& net, const std::string& query, const Evidence& evidence) {
    Problem p;
    p.names = net.nodes();
    std::sort(p.names.begin(), p.names.end());
    auto id_of = [&](const std::string& name) {
        auto it = std::lower_bound(p.names.begin(), p.names.end(), name);
        if (it == p.names.end() || *it != name) throw DomainError("unknown variable " + name);
        return static_cast<int>(it - p.names.begin());
    };
    p.query = id_of(query);
    for (const auto& [var, state] : evidence) {
        const int id = id_of(var);
        if (id == p.query) throw DomainError("query variable " + query + " is also evidence");
        p.observed[id] = net.variable(var).state_index(state);
    }
    return p;
}

Factor cpt_factor(const bn::BayesianNetwork& net, const Problem& p, const std::string& node) {
    const auto& cpt = net.cpt(node);
    auto id_of = [&](const std::string& name) {
        return static_cast<int>(std::lower_bound(p.names.begin(), p.names.end(), name) - p.names.begin());
    };
    // Source layout: parents (sorted by name == sorted by id), then child.
    std::vector<int> src_vars;
    std::vector<std::size_t> src_cards;
    for (std::size_t i = 0; i < cpt.parents().size(); ++i) {
        src_vars.push_back(id_of(cpt.parents()[i]));
        src_cards.push_back(cpt.parent_cardinalities()[i]);
    }
    src_vars.push_back(id_of(node));
    src_cards.push_back(cpt.child_cardinality());

    Factor f;
    std::vector<std::size_t> order(src_vars.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return src_vars[a] < src_vars[b]; });
    for (auto i : order) {
        f.vars.push_back(src_vars[i]);
        f.cards.push_back(src_cards[i]);
    }
    std::vector<std::size_t> stride(f.vars.size());
    std::size_t s = 1;
    for (std::size_t i = f.vars.size(); i-- > 0;) {
        stride[i] = s;
        s *= f.cards[i];
    }
    // position of each source var within f
    std::vector<std::size_t> pos(src_vars.size());
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;

    f.values.resize(static_cast<Eigen::Index>(s));
    const auto& table = cpt.table();
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        const auto parent_states = cpt.row_states(static_cast<std::size_t>(r));
        std::size_t base = 0;
        for (std::size_t i = 0; i < parent_states.size(); ++i) base += parent_states[i] * stride[pos[i]];
        for (Eigen::Index c = 0; c < table.cols(); ++c)
            f.values[static_cast<Eigen::Index>(base + static_cast<std::size_t>(c) * stride[pos.back()])] = table(r, c);
    }
    return f;
}

std::vector<int> min_degree_order(const std::vector<Factor>& factors, const Problem& p) {
    std::map<int, std::set<int>> graph;
    for (const auto& f : factors)
        for (int a : f.vars) {
            graph[a];
            for (int b : f.vars)
                if (a != b) graph[a].insert(b);
        }
    std::vector<int> order;
    std::set<int> remaining;
    for (const auto& [v, _] : graph)
        if (v != p.query) remaining.insert(v);
    while (!remaining.empty()) {
        int best = -1;
        std::size_t best_degree = 0;
        // Ids are assigned in name order, so scanning ascending ids breaks ties by name.
        for (int v : remaining) {
            const auto d = graph[v].size();
            if (best < 0 || d < best_degree) {
                best = v;
                best_degree = d;
            }
        }
        const auto neighbours = graph[best];
        for (int a : neighbours) {
            graph[a].erase(best);
            for (int b : neighbours)
                if (a != b) graph[a].insert(b);
        }
        graph.erase(best);
        remaining.erase(best);
        order.push_back(best);
    }
    return order;
}

std::vector<Factor> reduced_factors(const bn::BayesianNetwork& net, const Problem& p) {
    std::vector<Factor> factors;
    for (const auto& node : net.nodes()) {
        Factor f = cpt_factor(net, p, node);
        for (const auto& [var, state] : p.observed) f = detail::restrict_to(f, var, state);
        factors.push_back(std::move(f));
    }
    return factors;
}

Posterior finish(const bn::BayesianNetwork& net, const std::string& query, Eigen::VectorXd unnormalized,
                 const Evidence& evidence) {
    const double z = unnormalized.sum();
    if (!(z > 0.0)) {
        std::string ev;
        for (const auto& [k, v] : evidence) ev += (ev.empty() ? "" : ", ") + k + "=" + v;
        throw InconsistentEvidence("evidence {" + ev + "} has probability zero");
    }
    Posterior out;
    out.variable = query;
    out.states = net.variable(query).states;
    out.probabilities = unnormalized / z;
    return out;
}

}  // namespace

std::vector<std::string> elimination_order(const bn::BayesianNetwork& network, const std::string& query,
                                           const Evidence& evidence) {
    const auto p = prepare(network, query, evidence);
    std::vector<std::string> names;
    for (int id : min_degree_order(reduced_factors(network, p), p)) names.push_back(p.names[static_cast<std::size_t>(id)]);
    return names;
}

Posterior posterior(const bn::BayesianNetwork& network, const std::string& query, const Evidence& evidence) {
    const auto p = prepare(network, query, evidence);
    auto factors = reduced_factors(network, p);

    for (int var : min_degree_order(factors, p)) {
        Factor product;
        product.values = Eigen::VectorXd::Ones(1);
        std::vector<Factor> rest;
        for (auto& f : factors) {
            if (std::binary_search(f.vars.begin(), f.vars.end(), var)) product = detail::multiply(product, f);
            else rest.push_back(std::move(f));
        }
        rest.push_back(detail::sum_out(product, var));
        factors = std::move(rest);
    }

    Factor joint;
    joint.values = Eigen::VectorXd::Ones(1);
    for (const auto& f : factors) joint = detail::multiply(joint, f);
    // Only the query variable can remain in scope.
    Eigen::VectorXd values = joint.values;
    if (joint.vars.empty())
        values = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(network.variable(query).cardinality()),
                                           joint.values[0]);
    return finish(network, query, std::move(values), evidence);
}

Posterior brute_force_posterior(const bn::BayesianNetwork& network, const std::string& query,
                                const Evidence& evidence) {
    if (network.size() > kBruteForceMaxNodes)
        throw DomainError("brute-force enumeration refused for " + std::to_string(network.size()) +
                          " nodes (limit " + std::to_string(kBruteForceMaxNodes) + ")");
    const auto p = prepare(network, query, evidence);  // argument checks only
    (void)p;

    const auto& nodes = network.nodes();
    const auto& qvar = network.variable(query);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(qvar.cardinality()));
    std::vector<std::size_t> idx(nodes.size(), 0);
    bn::Assignment assignment;
    while (true) {
        bool consistent = true;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& state = network.variable(nodes[i]).states[idx[i]];
            assignment[nodes[i]] = state;
            if (auto ev = evidence.find(nodes[i]); ev != evidence.end() && ev->second != state) consistent = false;
        }
        if (consistent)
            acc[static_cast<Eigen::Index>(qvar.state_index(assignment[query]))] +=
                bn::joint_probability(network, assignment);
        std::size_t k = 0;
        while (k < nodes.size()) {
            if (++idx[k] < network.variable(nodes[k]).cardinality()) break;
            idx[k++] = 0;
        }
        if (k == nodes.size()) break;
    }
    return finish(network, query, std::move(acc), evidence);
}

}  // namespace wheelhouse::inference
