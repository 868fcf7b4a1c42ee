#pragma once

namespace bgsa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bgsa
