#include "wheelhouse/bn/structure.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "wheelhouse/error.hpp"

namespace wheelhouse::bn {

const char* to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::missing_field: return "missing-field";
        case ViolationCode::duplicate_node: return "duplicate-node";
        case ViolationCode::unknown_endpoint: return "unknown-endpoint";
        case ViolationCode::self_edge: return "self-edge";
        case ViolationCode::duplicate_edge: return "duplicate-edge";
        case ViolationCode::cycle: return "cycle";
    }
    return "unknown";
}

std::string ValidationReport::summary() const {
    if (valid()) return "valid";
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) out << "; ";
        out << to_string(violations[i].code) << ": " << violations[i].message;
    }
    return out.str();
}

namespace {

// Returns the first cycle found by DFS in declaration order, as a closed path.
std::vector<std::string> find_cycle(const std::vector<std::string>& nodes,
                                    const std::map<std::string, std::vector<std::string>>& adj) {
    enum class Color { white, gray, black };
    std::map<std::string, Color> color;
    for (const auto& n : nodes) color[n] = Color::white;

    struct Frame {
        std::string node;
        std::size_t next = 0;
    };

    for (const auto& root : nodes) {
        if (color[root] != Color::white) continue;
        std::vector<Frame> stack{{root}};
        color[root] = Color::gray;
        while (!stack.empty()) {
            Frame& top = stack.back();
            auto it = adj.find(top.node);
            if (it == adj.end() || top.next >= it->second.size()) {
                color[top.node] = Color::black;
                stack.pop_back();
                continue;
            }
            const std::string& next = it->second[top.next++];
            if (color[next] == Color::gray) {
                std::vector<std::string> path;
                auto start = std::find_if(stack.begin(), stack.end(),
                                          [&](const Frame& f) { return f.node == next; });
                for (auto f = start; f != stack.end(); ++f) path.push_back(f->node);
                path.push_back(next);
                return path;
            }
            if (color[next] == Color::white) {
                color[next] = Color::gray;
                stack.push_back({next});
            }
        }
    }
    return {};
}

std::string join_path(const std::vector<std::string>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += "->";
        out += path[i];
    }
    return out;
}

}  // namespace

ValidationReport validate_structure(const NetworkStructure& structure) {
    ValidationReport report;
    auto add = [&](ViolationCode code, std::string msg, std::vector<std::string> path = {}) {
        report.violations.push_back({code, std::move(msg), std::move(path)});
    };

    std::set<std::string> known;
    for (const auto& n : structure.nodes) {
        if (n.empty()) {
            add(ViolationCode::missing_field, "node with empty name");
            continue;
        }
        if (!known.insert(n).second) add(ViolationCode::duplicate_node, "duplicate node " + n);
    }

    std::set<std::pair<std::string, std::string>> seen;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [from, to] : structure.edges) {
        bool endpoints_ok = true;
        for (const auto* end : {&from, &to}) {
            if (!known.contains(*end)) {
                add(ViolationCode::unknown_endpoint,
                    "edge " + from + "->" + to + " references unknown node " +
                        (end->empty() ? std::string("<empty>") : *end));
                endpoints_ok = false;
            }
        }
        if (from == to) {
            add(ViolationCode::self_edge, "self-edge on " + from);
            continue;
        }
        if (!seen.insert({from, to}).second) {
            add(ViolationCode::duplicate_edge, "duplicate edge " + from + "->" + to);
            continue;
        }
        if (endpoints_ok) adj[from].push_back(to);
    }

    std::vector<std::string> unique_nodes;
    std::set<std::string> emitted;
    for (const auto& n : structure.nodes)
        if (!n.empty() && emitted.insert(n).second) unique_nodes.push_back(n);

    if (auto cycle = find_cycle(unique_nodes, adj); !cycle.empty())
        add(ViolationCode::cycle, "cycle " + join_path(cycle), std::move(cycle));

    return report;
}

std::vector<std::string> topological_order(const NetworkStructure& structure) {
    if (auto report = validate_structure(structure); !report.valid())
        throw StructureError("cannot order invalid structure: " + report.summary());

    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> children;
    for (const auto& n : structure.nodes) indegree[n] = 0;
    for (const auto& [from, to] : structure.edges) {
        ++indegree[to];
        children[from].push_back(to);
    }

    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [n, d] : indegree)
        if (d == 0) ready.push(n);

    std::vector<std::string> order;
    order.reserve(structure.nodes.size());
    while (!ready.empty()) {
        std::string n = ready.top();
        ready.pop();
        for (const auto& c : children[n])
            if (--indegree[c] == 0) ready.push(c);
        order.push_back(std::move(n));
    }
    return order;
}

std::vector<std::string> parents_of(const NetworkStructure& structure, const std::string& node) {
    std::vector<std::string> parents;
    for (const auto& [from, to] : structure.edges)
        if (to == node) parents.push_back(from);
    std::sort(parents.begin(), parents.end());
    parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
    return parents;
}

}  // namespace wheelhouse::bn
