#pragma once

namespace meso {

inline constexpr const char* kToolName = "mesoherald";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace meso
