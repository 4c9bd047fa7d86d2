#pragma once

namespace cctrace {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cctrace
