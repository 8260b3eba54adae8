#pragma once

namespace msent {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kCsvSchemaVersion = "trajectory-v1";

}  // namespace msent
