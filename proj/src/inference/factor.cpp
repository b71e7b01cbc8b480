#include "factor.hpp"

#include <algorithm>

namespace wheelhouse::inference::detail {

namespace {

// Strides of `f`'s variables expressed against the variable list `scope`;
// variables absent from f get stride 0.
std::vector<std::size_t> strides_in(const Factor& f, const std::vector<int>& scope) {
    std::vector<std::size_t> own(f.vars.size());
    std::size_t s = 1;
    for (std::size_t i = f.vars.size(); i-- > 0;) {
        own[i] = s;
        s *= f.cards[i];
    }
    std::vector<std::size_t> out(scope.size(), 0);
    for (std::size_t i = 0; i < scope.size(); ++i) {
        auto it = std::find(f.vars.begin(), f.vars.end(), scope[i]);
        if (it != f.vars.end()) out[i] = own[static_cast<std::size_t>(it - f.vars.begin())];
    }
    return out;
}

}  // namespace

Factor multiply(const Factor& a, const Factor& b) {
    Factor out;
    std::size_t i = 0, j = 0;
    while (i < a.vars.size() || j < b.vars.size()) {
        if (j == b.vars.size() || (i < a.vars.size() && a.vars[i] < b.vars[j])) {
            out.vars.push_back(a.vars[i]);
            out.cards.push_back(a.cards[i++]);
        } else if (i == a.vars.size() || b.vars[j] < a.vars[i]) {
            out.vars.push_back(b.vars[j]);
            out.cards.push_back(b.cards[j++]);
        } else {
            out.vars.push_back(a.vars[i]);
            out.cards.push_back(a.cards[i++]);
            ++j;
        }
    }
    std::size_t total = 1;
    for (auto c : out.cards) total *= c;
    out.values.resize(static_cast<Eigen::Index>(total));

    const auto sa = strides_in(a, out.vars);
    const auto sb = strides_in(b, out.vars);
    std::vector<std::size_t> counter(out.vars.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k < total; ++k) {
        out.values[static_cast<Eigen::Index>(k)] =
            a.values[static_cast<Eigen::Index>(ia)] * b.values[static_cast<Eigen::Index>(ib)];
        for (std::size_t d = out.vars.size(); d-- > 0;) {
            if (++counter[d] < out.cards[d]) {
                ia += sa[d];
                ib += sb[d];
                break;
            }
            ia -= sa[d] * (out.cards[d] - 1);
            ib -= sb[d] * (out.cards[d] - 1);
            counter[d] = 0;
        }
    }
    return out;
}

Factor sum_out(const Factor& f, int var) {
    auto it = std::find(f.vars.begin(), f.vars.end(), var);
    if (it == f.vars.end()) return f;
    const auto pos = static_cast<std::size_t>(it - f.vars.begin());

    Factor out;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        if (i == pos) continue;
        out.vars.push_back(f.vars[i]);
        out.cards.push_back(f.cards[i]);
    }
    std::size_t inner = 1;
    for (std::size_t i = pos + 1; i < f.cards.size(); ++i) inner *= f.cards[i];
    const std::size_t card = f.cards[pos];
    const std::size_t outer = f.size() / (inner * card);
    out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outer * inner));
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t c = 0; c < card; ++c)
            for (std::size_t in = 0; in < inner; ++in)
                out.values[static_cast<Eigen::Index>(o * inner + in)] +=
                    f.values[static_cast<Eigen::Index>((o * card + c) * inner + in)];
    return out;
}

Factor restrict_to(const Factor& f, int var, std::size_t state) {
    auto it = std::find(f.vars.begin(), f.vars.end(), var);
    if (it == f.vars.end()) return f;
    const auto pos = static_cast<std::size_t>(it - f.vars.begin());

    Factor out;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        if (i == pos) continue;
        out.vars.push_back(f.vars[i]);
        out.cards.push_back(f.cards[i]);
    }
    std::size_t inner = 1;
    for (std::size_t i = pos + 1; i < f.cards.size(); ++i) inner *= f.cards[i];
    const std::size_t card = f.cards[pos];
    const std::size_t outer = f.size() / (inner * card);
    out.values.resize(static_cast<Eigen::Index>(outer * inner));
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t in = 0; in < inner; ++in)
            out.values[static_cast<Eigen::Index>(o * inner + in)] =
                f.values[static_cast<Eigen::Index>((o * card + state) * inner + in)];
    return out;
}

}  // namespace wheelhouse::inference::detail
