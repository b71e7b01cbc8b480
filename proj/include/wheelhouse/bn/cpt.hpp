#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wheelhouse::bn {

inline constexpr double kProbabilityTolerance = 1e-9;

// Conditional probability table P(child | parents).
//
// Rows enumerate parent-state combinations in mixed-radix order over the
// lexicographically sorted parent list, last parent varying fastest; columns
// are child states in variable order. Construction canonicalizes the parent
// order and rejects tables that are not row-stochastic.
class Cpt {
public:
    Cpt(std::string child, std::size_t child_cardinality, std::vector<std::string> parents,
        std::vector<std::size_t> parent_cardinalities, Eigen::MatrixXd table);

    // Uniform distribution in every row.
    static Cpt uniform(std::string child, std::size_t child_cardinality,
                       std::vector<std::string> parents,
                       std::vector<std::size_t> parent_cardinalities);

    const std::string& child() const { return child_; }
    std::size_t child_cardinality() const { return static_cast<std::size_t>(table_.cols()); }
    const std::vector<std::string>& parents() const { return parents_; }
    const std::vector<std::size_t>& parent_cardinalities() const { return parent_cards_; }
    const Eigen::MatrixXd& table() const { return table_; }
    std::size_t row_count() const { return static_cast<std::size_t>(table_.rows()); }

    // parent_states indexed like parents().
    std::size_t row_index(std::span<const std::size_t> parent_states) const;
    std::vector<std::size_t> row_states(std::size_t row) const;
    double probability(std::size_t child_state, std::span<const std::size_t> parent_states) const;

    friend bool operator==(const Cpt& a, const Cpt& b) {
        return a.child_ == b.child_ && a.parents_ == b.parents_ &&
               a.parent_cards_ == b.parent_cards_ && a.table_ == b.table_;
    }

private:
    std::string child_;
    std::vector<std::string> parents_;
    std::vector<std::size_t> parent_cards_;
    Eigen::MatrixXd table_;
};

}  // namespace wheelhouse::bn
