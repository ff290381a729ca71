#pragma once

namespace kcex {

inline constexpr const char* kToolName = "kcex";
inline constexpr const char* kVersion = "0.1.0";

} // namespace kcex
