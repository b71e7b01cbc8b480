#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace wheelhouse::inference::detail {

// Table over a sorted set of variable ids; mixed-radix layout, last variable
// fastest.
struct Factor {
    std::vector<int> vars;
    std::vector<std::size_t> cards;
    Eigen::VectorXd values;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, int var);
Factor restrict_to(const Factor& f, int var, std::size_t state);

}  // namespace wheelhouse::inference::detail
