#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace wheelhouse::analysis::detail {

// Runs fn(0..n-1) on up to `jobs` threads; rethrows the first failure by index.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    const std::size_t width = std::max(1u, jobs);
    for (std::size_t base = 0; base < n; base += width) {
        std::vector<std::jthread> workers;
        for (std::size_t i = base; i < std::min(n, base + width); ++i)
            workers.emplace_back([&, i] {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\n";
}

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace wheelhouse::analysis::detail
