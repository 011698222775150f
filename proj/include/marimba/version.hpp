#pragma once

namespace marimba {

inline constexpr const char* kVersion = "marimba 1.0.0";

}  // namespace marimba
