#include <algorithm>
#include <cmath>

#include "wheelhouse/bn/vocabulary.hpp"
#include "wheelhouse/cpt_engine.hpp"
#include "wheelhouse/error.hpp"

namespace wheelhouse {

namespace {

constexpr std::pair<TradeAction, const char*> kActionNames[] = {
    {TradeAction::sell_put, "sell_put"},   {TradeAction::roll_put, "roll_put"},
    {TradeAction::assign, "assign"},       {TradeAction::sell_call, "sell_call"},
    {TradeAction::expire_worthless, "expire_worthless"}, {TradeAction::close, "close"},
};

}  // namespace

const char* to_string(TradeAction action) {
    for (const auto& [a, name] : kActionNames)
        if (a == action) return name;
    return "close";
}

TradeAction parse_trade_action(std::string_view text) {
    for (const auto& [a, name] : kActionNames)
        if (text == name) return a;
    throw DataError("unknown trade action '" + std::string(text) + "'");
}

FactorSchema::FactorSchema(std::vector<bn::Variable> variables) : variables_(std::move(variables)) {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        bn::check_variable(variables_[i]);
        for (std::size_t j = 0; j < i; ++j)
            if (variables_[j].name == variables_[i].name)
                throw SchemaError("duplicate factor '" + variables_[i].name + "' in schema");
    }
}

FactorSchema FactorSchema::defaults() { return FactorSchema(bn::default_factor_variables()); }

const bn::Variable* FactorSchema::find(std::string_view name) const {
    for (const auto& v : variables_)
        if (v.name == name) return &v;
    return nullptr;
}

void check_record(const TradeRecord& r, const FactorSchema& schema) {
    if (r.id.empty()) throw DataError("trade record without id");
    if (!(r.premium >= 0.0) || !std::isfinite(r.premium))
        throw DataError("trade " + r.id + ": premium must be non-negative");
    if (r.contracts < 1) throw DataError("trade " + r.id + ": contracts must be >= 1");
    for (const auto& [name, state] : r.factors) {
        const auto* v = schema.find(name);
        if (!v) continue;
        if (std::find(v->states.begin(), v->states.end(), state) == v->states.end())
            throw DataError("trade " + r.id + ": '" + state + "' is not a state of " + name);
    }
}

TradeStore::TradeStore(std::vector<TradeRecord> records) : records_(std::move(records)) {
    std::stable_sort(records_.begin(), records_.end(),
                     [](const TradeRecord& a, const TradeRecord& b) { return a.date < b.date; });
}

void TradeStore::add(TradeRecord record) {
    const auto pos = std::upper_bound(records_.begin(), records_.end(), record.date,
                                      [](const Date& d, const TradeRecord& r) { return d < r.date; });
    records_.insert(pos, std::move(record));
}

}  // namespace wheelhouse
