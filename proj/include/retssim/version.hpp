#pragma once

namespace retssim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace retssim
