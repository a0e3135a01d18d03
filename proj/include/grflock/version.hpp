#pragma once

namespace grflock {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace grflock
