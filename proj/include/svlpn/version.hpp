#pragma once

namespace svlpn {

inline constexpr const char* kToolName = "svlpn";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace svlpn
