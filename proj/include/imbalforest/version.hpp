#pragma once

namespace imbalforest {

inline constexpr const char* kVersion = "0.1.0";

} // namespace imbalforest
