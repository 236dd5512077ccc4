#pragma once

namespace screenlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace screenlab
