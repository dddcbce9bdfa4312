#pragma once

namespace harqlink {

inline constexpr const char* kToolName = "harqlink";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace harqlink
