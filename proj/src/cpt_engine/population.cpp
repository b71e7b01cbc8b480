#include <algorithm>
#include <cmath>
#include <set>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/error.hpp"

namespace wheelhouse {

namespace {

bool matches(const TradeRecord& r, const FactorStates& wanted, std::span<const std::string> keys) {
    for (const auto& key : keys) {
        const auto want = wanted.find(key);
        if (want == wanted.end()) continue;
        const auto have = r.factors.find(key);
        if (have == r.factors.end() || have->second != want->second) return false;
    }
    return true;
}

bool newer_first(const TradeRecord* a, const TradeRecord* b) {
    if (a->date != b->date) return a->date > b->date;
    return a->id < b->id;
}

std::optional<std::size_t> state_of(const TradeRecord& r, const bn::Variable& v) {
    const auto it = r.factors.find(v.name);
    if (it == r.factors.end()) return std::nullopt;
    const auto pos = std::find(v.states.begin(), v.states.end(), it->second);
    if (pos == v.states.end()) return std::nullopt;
    return static_cast<std::size_t>(pos - v.states.begin());
}

}  // namespace

void check_policies(const PopulationPolicies& p) {
    if (p.selection.window_days < 1) throw ConfigError("selection window must be >= 1 trading day");
    if (!(p.smoothing.pseudo_count >= 0.0) || !std::isfinite(p.smoothing.pseudo_count))
        throw ConfigError("pseudo_count must be >= 0");
    if (!(p.volatility.low_below <= p.volatility.high_at))
        throw ConfigError("volatility thresholds must be ordered");
}

FactorStates context_factor_states(const MarketContext& context, const VolatilityThresholds& thresholds) {
    return {{bn::var::market_regime, to_string(context.market_regime)},
            {bn::var::volatility_level, volatility_level(context.volatility, thresholds)}};
}

std::vector<TradeRecord> select_relevant_trades(const TradeStore& store, const MarketContext& context, Date as_of,
                                                const SelectionPolicy& policy, const TradingCalendar& calendar,
                                                const VolatilityThresholds& thresholds) {
    if (store.empty()) return {};
    const Date first = calendar.subtract_trading_days(as_of, policy.window_days);
    const Date last = as_of - 1;
    std::vector<const TradeRecord*> window;
    for (const auto& r : store.records())
        if (r.date >= first && r.date <= last) window.push_back(&r);
    std::sort(window.begin(), window.end(), newer_first);

    const auto wanted = context_factor_states(context, thresholds);
    std::vector<const TradeRecord*> chosen;
    std::set<const TradeRecord*> taken;
    for (const auto* r : window)
        if (matches(*r, wanted, policy.match_keys)) {
            chosen.push_back(r);
            taken.insert(r);
        }
    const std::span<const std::string> keys(policy.match_keys);
    for (std::size_t drop = 1; chosen.size() < policy.min_sample && drop <= keys.size(); ++drop) {
        const auto relaxed = keys.first(keys.size() - drop);
        for (const auto* r : window) {
            if (chosen.size() >= policy.min_sample) break;
            if (!taken.count(r) && matches(*r, wanted, relaxed)) {
                chosen.push_back(r);
                taken.insert(r);
            }
        }
    }

    std::vector<TradeRecord> out;
    out.reserve(chosen.size());
    for (const auto* r : chosen) out.push_back(*r);
    return out;
}

CptEstimate estimate_cpt(std::span<const TradeRecord> records, const bn::Variable& child,
                         std::span<const bn::Variable> parents, const SmoothingPolicy& smoothing) {
    if (child.cardinality() < 2) throw DomainError("child " + child.name + " needs at least two states");
    if (!(smoothing.pseudo_count >= 0.0)) throw DomainError("pseudo_count must be >= 0");

    std::vector<const bn::Variable*> sorted;
    for (const auto& p : parents) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });

    std::size_t rows = 1;
    std::vector<std::string> parent_names;
    std::vector<std::size_t> parent_cards;
    for (const auto* p : sorted) {
        rows *= p->cardinality();
        parent_names.push_back(p->name);
        parent_cards.push_back(p->cardinality());
    }
    const auto k = child.cardinality();

    CptEstimate est{bn::Cpt::uniform(child.name, k, parent_names, parent_cards),
                    Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k)),
                    {},
                    0};
    for (const auto& r : records) {
        const auto cs = state_of(r, child);
        std::size_t row = 0;
        bool ok = cs.has_value();
        for (std::size_t i = 0; ok && i < sorted.size(); ++i) {
            const auto ps = state_of(r, *sorted[i]);
            ok = ps.has_value();
            if (ok) row = row * parent_cards[i] + *ps;
        }
        if (!ok) {
            ++est.skipped;
            continue;
        }
        est.counts(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(*cs)) += 1.0;
        est.contributing_ids.push_back(r.id);
    }

    const double a = smoothing.pseudo_count;
    Eigen::MatrixXd table(est.counts.rows(), est.counts.cols());
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        const double total = est.counts.row(i).sum() + a * static_cast<double>(k);
        if (total > 0.0) {
            table.row(i) = (est.counts.row(i).array() + a) / total;
        } else {
            table.row(i).setConstant(1.0 / static_cast<double>(k));
        }
    }
    est.cpt = bn::Cpt(child.name, k, parent_names, parent_cards, std::move(table));
    return est;
}

PopulationResult populate_network(const bn::NetworkStructure& structure, const TradeStore& store,
                                  const MarketContext& context, Date as_of, const PopulationPolicies& policies,
                                  const FactorSchema& schema, const TradingCalendar& calendar) {
    check_policies(policies);
    const auto report = bn::validate_structure(structure);
    if (!report.valid()) throw StructureError("cannot populate an invalid structure: " + report.summary());

    std::vector<std::string> diagnostics;
    std::vector<bn::Variable> variables;
    std::map<std::string, bn::Variable> by_name;
    for (const auto& node : structure.nodes) {
        bn::Variable v;
        if (const auto* known = schema.find(node)) {
            v = *known;
        } else {
            v = {node, bn::fallback_states()};
            diagnostics.push_back("unknown node " + node + ": uniform CPT over fallback states");
        }
        by_name.emplace(node, v);
        variables.push_back(std::move(v));
    }

    const auto selected =
        select_relevant_trades(store, context, as_of, policies.selection, calendar, policies.volatility);
    if (selected.empty()) diagnostics.emplace_back("no historical records selected: CPTs follow smoothing only");

    std::set<std::string> provenance;
    std::vector<bn::Cpt> cpts;
    for (const auto& node : structure.nodes) {
        const auto& child = by_name.at(node);
        std::vector<bn::Variable> parents;
        for (const auto& p : bn::parents_of(structure, node)) parents.push_back(by_name.at(p));
        if (!schema.contains(node)) {
            std::vector<std::string> names;
            std::vector<std::size_t> cards;
            for (const auto& p : parents) {
                names.push_back(p.name);
                cards.push_back(p.cardinality());
            }
            cpts.push_back(bn::Cpt::uniform(node, child.cardinality(), names, cards));
            continue;
        }
        auto est = estimate_cpt(selected, child, parents, policies.smoothing);
        if (est.skipped > 0)
            diagnostics.push_back(node + ": skipped " + std::to_string(est.skipped) + " record(s) lacking factors");
        provenance.insert(est.contributing_ids.begin(), est.contributing_ids.end());
        cpts.push_back(std::move(est.cpt));
    }

    std::optional<Date> latest;
    for (const auto& r : selected)
        if (provenance.count(r.id) && (!latest || r.date > *latest)) latest = r.date;

    return PopulationResult{bn::BayesianNetwork::create(std::move(variables), structure, std::move(cpts)),
                            as_of,
                            selected.size(),
                            {provenance.begin(), provenance.end()},
                            latest,
                            std::move(diagnostics)};
}

}  // namespace wheelhouse
