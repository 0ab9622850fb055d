#pragma once

namespace emspec {

inline constexpr const char* kVersion = "0.1.0";

// Identifier of the counter-based random stream documented in rng.hpp.
// Bump whenever the (seed, counter) -> value mapping changes.
inline constexpr const char* kRngVersion = "sm64/1";

}  // namespace emspec
