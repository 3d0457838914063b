#pragma once

namespace cbl {

inline constexpr const char* kToolName = "cblbench";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace cbl
