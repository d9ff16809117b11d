#pragma once

#include <stdexcept>

namespace retssim {

// Invalid parameters or malformed configuration. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable, malformed, or insufficient input data. CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quality gate was violated (clamp budget, comparison threshold). CLI exit code 4.
struct ThresholdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitUnknown = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitThreshold = 4;

}  // namespace retssim
