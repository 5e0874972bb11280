#pragma once

namespace frametop {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace frametop
