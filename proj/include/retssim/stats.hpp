#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "retssim/series.hpp"

namespace retssim {

inline constexpr double kHistogramLowerEdge = 1.0e-2;

// Log-spaced edges with bins_per_decade bins per decade, starting at
// kHistogramLowerEdge and extending until max_value is covered.
std::vector<double> log_bin_edges(double max_value, int bins_per_decade);

// Log-binned density of |r| spanning [1e-2, max |r|]. Requires a normalized
// series and bins_per_decade >= 4; entries with zero_flags are dropped when
// exclude_zero_flagged is set. density = count / (N * bin_width) with N the
// post-exclusion sample count. Throws DataError when nothing remains.
HistogramEstimate pdf_estimate(const ReturnSeries& series, int bins_per_decade,
                               bool exclude_zero_flagged);

// Same histogram on a caller-fixed grid, so ensemble members share edges.
HistogramEstimate pdf_estimate_on(const ReturnSeries& series,
                                  const std::vector<double>& bin_edges,
                                  bool exclude_zero_flagged);

enum class WindowKind { kRectangular, kHann };

// Welch-style average of one-sided periodograms of |r| over non-overlapping
// segments with per-segment mean removal; frequency axis k/(L*tau) Hz for
// k = 1..L/2. Power is scaled so that sum(power)*df equals the mean-removed
// segment variance (exactly, for the rectangular window). Throws DataError if
// the series is shorter than one segment; ConfigError unless segment_length
// is a power of two >= 8.
SpectrumEstimate psd_estimate(const ReturnSeries& series, int segment_length,
                              double tau_seconds,
                              WindowKind window = WindowKind::kRectangular);

// Ordinary least squares of log10(y) on log10(x) restricted to [lo, hi],
// keeping points with positive ordinate; needs >= 5 such points (DataError
// otherwise). The standard error is the usual OLS slope error.
SlopeFit slope_fit_xy(std::span<const double> x, std::span<const double> y,
                      double lo, double hi);
SlopeFit slope_fit(const HistogramEstimate& h, double lo, double hi);
SlopeFit slope_fit(const SpectrumEstimate& s, double lo_hz, double hi_hz);

// Pointwise arithmetic mean over identical grids; counts and segment tallies
// are summed. Fixed left-to-right summation order keeps the result
// permutation-stable to double round-off. Throws DataError on grid mismatch
// or empty input.
HistogramEstimate ensemble_merge(const std::vector<HistogramEstimate>& parts);
SpectrumEstimate ensemble_merge(const std::vector<SpectrumEstimate>& parts);

// Mean |log10 a - log10 b| over bins where both inputs have at least
// min_count samples (and positive density). Grids must agree on the shared
// index range. Throws DataError if no bin qualifies.
double pdf_compare_metric(const HistogramEstimate& a, const HistogramEstimate& b,
                          std::uint64_t min_count = 100);

// Mean |log10 Sa - log10 Sb| over the shared frequency axis restricted to
// [f_lo, f_hi]. Throws DataError on axis mismatch or empty band.
double psd_compare_metric(const SpectrumEstimate& a, const SpectrumEstimate& b,
                          double f_lo, double f_hi);

}  // namespace retssim
