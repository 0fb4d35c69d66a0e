#pragma once

namespace simaudit {

inline constexpr const char* kToolVersion = "0.1.0";
// Bumped whenever report.json / CSV column layouts change.
inline constexpr int kFormatVersion = 1;

}  // namespace simaudit
