#pragma once

namespace decaylab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace decaylab
