#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace retssim {

// A uniformly spaced sequence of signed returns at window length tau.
// Empirical series built from several trading sessions are concatenated in
// session order; values stay uniformly indexed and zero_flags marks windows
// whose price did not change (no trade or no price move).
struct ReturnSeries {
  double tau_seconds = 0.0;
  double start_time_seconds = 0.0;
  bool normalized = false;
  std::vector<double> values;
  std::vector<std::uint8_t> zero_flags;  // empty means "all false"

  bool zero_flag(std::size_t i) const {
    return !zero_flags.empty() && zero_flags[i] != 0;
  }
  std::size_t size() const { return values.size(); }
};

// Log-binned probability density of |r|. densities are per unit |r|:
// density[i] = counts[i] / (total_count * (bin_edges[i+1] - bin_edges[i])),
// so the grid-covered mass (sum density * width) never exceeds 1.
struct HistogramEstimate {
  std::vector<double> bin_edges;        // size = bins + 1, log-spaced
  std::vector<double> density;          // size = bins
  std::vector<std::uint64_t> counts;    // size = bins
  std::uint64_t total_count = 0;        // all samples, including out-of-range

  std::size_t bins() const { return density.size(); }
  double bin_center(std::size_t i) const {  // geometric center
    return std::sqrt(bin_edges[i] * bin_edges[i + 1]);
  }
};

// One-sided power spectral density with a physical frequency axis in Hz.
// freq_hz[k-1] = k / (segment_length * tau_seconds) for k = 1..L/2.
struct SpectrumEstimate {
  std::vector<double> freq_hz;
  std::vector<double> power;
  int segment_length = 0;
  int segments_averaged = 0;
  double tau_seconds = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  int n_points = 0;
};

}  // namespace retssim
