#pragma once

namespace mixedspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mixedspec
