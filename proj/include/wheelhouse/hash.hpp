#pragma once

#include <string>
#include <string_view>

namespace wheelhouse {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// SHA-256 of a file's bytes; throws DataError if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace wheelhouse
