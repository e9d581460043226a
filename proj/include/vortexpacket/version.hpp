#pragma once

namespace vortex {

inline constexpr const char* kToolName = "vortexpacket";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace vortex
