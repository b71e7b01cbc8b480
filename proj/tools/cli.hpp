#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wheelhouse::cli {

// Exit codes: 0 success, 1 domain or data error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wheelhouse::cli
