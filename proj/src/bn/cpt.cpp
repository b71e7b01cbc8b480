#include "wheelhouse/bn/cpt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wheelhouse/error.hpp"

namespace wheelhouse::bn {

namespace {

std::size_t product(const std::vector<std::size_t>& cards) {
    return std::accumulate(cards.begin(), cards.end(), std::size_t{1}, std::multiplies<>{});
}

std::vector<std::size_t> decode(std::size_t row, const std::vector<std::size_t>& cards) {
    std::vector<std::size_t> states(cards.size());
    for (std::size_t i = cards.size(); i-- > 0;) {
        states[i] = row % cards[i];
        row /= cards[i];
    }
    return states;
}

std::size_t encode(std::span<const std::size_t> states, const std::vector<std::size_t>& cards) {
    std::size_t row = 0;
    for (std::size_t i = 0; i < cards.size(); ++i) row = row * cards[i] + states[i];
    return row;
}

}  // namespace

Cpt::Cpt(std::string child, std::size_t child_cardinality, std::vector<std::string> parents,
         std::vector<std::size_t> parent_cardinalities, Eigen::MatrixXd table)
    : child_(std::move(child)) {
    if (child_cardinality < 2)
        throw StructureError("CPT for " + child_ + " needs at least two child states");
    if (parents.size() != parent_cardinalities.size())
        throw StructureError("CPT for " + child_ + ": parent/cardinality length mismatch");
    for (auto c : parent_cardinalities)
        if (c == 0) throw StructureError("CPT for " + child_ + ": zero parent cardinality");
    const std::size_t rows = product(parent_cardinalities);
    if (static_cast<std::size_t>(table.rows()) != rows ||
        static_cast<std::size_t>(table.cols()) != child_cardinality) {
        std::ostringstream msg;
        msg << "CPT for " << child_ << " has shape " << table.rows() << "x" << table.cols()
            << ", expected " << rows << "x" << child_cardinality;
        throw StructureError(msg.str());
    }

    std::vector<std::size_t> perm(parents.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return parents[a] < parents[b]; });
    for (std::size_t i = 1; i < perm.size(); ++i)
        if (parents[perm[i]] == parents[perm[i - 1]])
            throw StructureError("CPT for " + child_ + " lists parent " + parents[perm[i]] + " twice");

    for (auto p : perm) {
        parents_.push_back(parents[p]);
        parent_cards_.push_back(parent_cardinalities[p]);
    }
    if (std::is_sorted(perm.begin(), perm.end())) {
        table_ = std::move(table);
    } else {
        table_.resize(table.rows(), table.cols());
        std::vector<std::size_t> canon(perm.size());
        for (std::size_t row = 0; row < rows; ++row) {
            auto given = decode(row, parent_cardinalities);
            for (std::size_t i = 0; i < perm.size(); ++i) canon[i] = given[perm[i]];
            table_.row(static_cast<Eigen::Index>(encode(canon, parent_cards_))) = table.row(row);
        }
    }

    for (Eigen::Index r = 0; r < table_.rows(); ++r) {
        const auto row = table_.row(r);
        if (!row.allFinite() || (row.array() < 0.0).any()) {
            std::ostringstream msg;
            msg << "CPT for " << child_ << " row " << r << " has a negative or non-finite entry";
            throw StructureError(msg.str());
        }
        const double sum = row.sum();
        if (std::abs(sum - 1.0) > kProbabilityTolerance) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "CPT for " << child_ << " row " << r << " sums to " << sum;
            throw StructureError(msg.str());
        }
    }
}

Cpt Cpt::uniform(std::string child, std::size_t child_cardinality, std::vector<std::string> parents,
                 std::vector<std::size_t> parent_cardinalities) {
    const auto rows = static_cast<Eigen::Index>(product(parent_cardinalities));
    const auto cols = static_cast<Eigen::Index>(child_cardinality);
    Eigen::MatrixXd table =
        Eigen::MatrixXd::Constant(rows, cols, cols > 0 ? 1.0 / static_cast<double>(cols) : 0.0);
    return Cpt(std::move(child), child_cardinality, std::move(parents),
               std::move(parent_cardinalities), std::move(table));
}

std::size_t Cpt::row_index(std::span<const std::size_t> parent_states) const {
    if (parent_states.size() != parents_.size())
        throw DomainError("CPT for " + child_ + ": wrong number of parent states");
    for (std::size_t i = 0; i < parent_states.size(); ++i)
        if (parent_states[i] >= parent_cards_[i])
            throw DomainError("CPT for " + child_ + ": parent state out of range");
    return encode(parent_states, parent_cards_);
}

std::vector<std::size_t> Cpt::row_states(std::size_t row) const {
    return decode(row, parent_cards_);
}

double Cpt::probability(std::size_t child_state, std::span<const std::size_t> parent_states) const {
    if (child_state >= child_cardinality())
        throw DomainError("CPT for " + child_ + ": child state out of range");
    return table_(static_cast<Eigen::Index>(row_index(parent_states)),
                  static_cast<Eigen::Index>(child_state));
}

}  // namespace wheelhouse::bn
