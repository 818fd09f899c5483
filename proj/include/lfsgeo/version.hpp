#pragma once

namespace lfsgeo {

inline constexpr const char* kVersion = "lfsgeo 0.1.0";

} // namespace lfsgeo
