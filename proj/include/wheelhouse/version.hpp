#pragma once

namespace wheelhouse {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace wheelhouse
