#include "retssim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "retssim/errors.hpp"

namespace retssim {

namespace {

// The FFTW planner is not thread-safe; executions on distinct buffers are.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

std::vector<double> log_bin_edges(double max_value, int bins_per_decade) {
  if (bins_per_decade < 4) {
    throw ConfigError("bins_per_decade must be at least 4");
  }
  if (!(max_value > 0.0) || !std::isfinite(max_value)) {
    throw DataError("histogram upper bound must be positive and finite");
  }
  const double lo_log = std::log10(kHistogramLowerEdge);
  int n_bins = 1;
  if (max_value > kHistogramLowerEdge) {
    n_bins = static_cast<int>(std::ceil((std::log10(max_value) - lo_log) *
                                        static_cast<double>(bins_per_decade) -
                                        1e-9));
    n_bins = std::max(n_bins, 1);
  }
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(n_bins) + 2);
  for (int j = 0; j <= n_bins; ++j) {
    edges.push_back(std::pow(10.0, lo_log + static_cast<double>(j) /
                                                static_cast<double>(bins_per_decade)));
  }
  while (edges.back() < max_value) {  // guard against round-off at the top
    const auto j = static_cast<double>(edges.size() - 1);
    edges.push_back(std::pow(10.0, lo_log + (j + 1.0) / static_cast<double>(bins_per_decade)));
  }
  return edges;
}

HistogramEstimate pdf_estimate_on(const ReturnSeries& series,
                                  const std::vector<double>& bin_edges,
                                  bool exclude_zero_flagged) {
  if (!series.normalized) {
    throw ConfigError("pdf_estimate expects a normalized series");
  }
  if (bin_edges.size() < 2) {
    throw ConfigError("histogram grid needs at least one bin");
  }
  HistogramEstimate h;
  h.bin_edges = bin_edges;
  const std::size_t n_bins = bin_edges.size() - 1;
  h.counts.assign(n_bins, 0);
  h.density.assign(n_bins, 0.0);
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (exclude_zero_flagged && series.zero_flag(i)) {
      continue;
    }
    ++used;
    const double v = std::abs(series.values[i]);
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), v);
    auto idx = static_cast<std::ptrdiff_t>(it - bin_edges.begin()) - 1;
    if (idx == static_cast<std::ptrdiff_t>(n_bins) && v == bin_edges.back()) {
      --idx;  // the maximum lands on the closed top edge
    }
    if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n_bins)) {
      ++h.counts[static_cast<std::size_t>(idx)];
    }
  }
  if (used == 0) {
    throw DataError("histogram input empty after exclusion");
  }
  h.total_count = used;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double width = bin_edges[b + 1] - bin_edges[b];
    h.density[b] = static_cast<double>(h.counts[b]) /
                   (static_cast<double>(used) * width);
  }
  return h;
}

HistogramEstimate pdf_estimate(const ReturnSeries& series, int bins_per_decade,
                               bool exclude_zero_flagged) {
  double max_abs = 0.0;
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (exclude_zero_flagged && series.zero_flag(i)) {
      continue;
    }
    ++used;
    max_abs = std::max(max_abs, std::abs(series.values[i]));
  }
  if (used == 0) {
    throw DataError("histogram input empty after exclusion");
  }
  if (!(max_abs > 0.0)) {
    throw DataError("histogram needs at least one non-zero value");
  }
  return pdf_estimate_on(series, log_bin_edges(max_abs, bins_per_decade),
                         exclude_zero_flagged);
}

SpectrumEstimate psd_estimate(const ReturnSeries& series, int segment_length,
                              double tau_seconds, WindowKind window) {
  if (!is_pow2(segment_length) || segment_length < 8) {
    throw ConfigError("segment_length must be a power of two >= 8");
  }
  if (!(tau_seconds > 0.0)) {
    throw ConfigError("tau must be positive");
  }
  const std::size_t length = static_cast<std::size_t>(segment_length);
  const std::size_t n_segments = series.values.size() / length;
  if (n_segments == 0) {
    throw DataError("series shorter than one spectrum segment");
  }

  std::vector<double> taper(length, 1.0);
  if (window == WindowKind::kHann) {
    for (std::size_t n = 0; n < length; ++n) {
      taper[n] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(n) /
                                       static_cast<double>(length)));
    }
  }
  double taper_power = 0.0;
  for (const double w : taper) {
    taper_power += w * w;
  }
  taper_power /= static_cast<double>(length);

  double* in = fftw_alloc_real(length);
  auto* out = fftw_alloc_complex(length / 2 + 1);
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(segment_length, in, out, FFTW_ESTIMATE);
  }
  if (plan == nullptr) {
    fftw_free(in);
    fftw_free(out);
    throw std::runtime_error("FFT planning failed");
  }

  const std::size_t n_freq = length / 2;  // k = 1 .. L/2
  std::vector<double> accum(n_freq, 0.0);
  for (std::size_t s = 0; s < n_segments; ++s) {
    const double* seg = series.values.data() + s * length;
    double mean = 0.0;
    for (std::size_t n = 0; n < length; ++n) {
      mean += std::abs(seg[n]);
    }
    mean /= static_cast<double>(length);
    for (std::size_t n = 0; n < length; ++n) {
      in[n] = (std::abs(seg[n]) - mean) * taper[n];
    }
    fftw_execute(plan);
    for (std::size_t k = 1; k <= n_freq; ++k) {
      const double re = out[k][0];
      const double im = out[k][1];
      accum[k - 1] += re * re + im * im;
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);

  SpectrumEstimate spec;
  spec.segment_length = segment_length;
  spec.segments_averaged = static_cast<int>(n_segments);
  spec.tau_seconds = tau_seconds;
  spec.freq_hz.resize(n_freq);
  spec.power.resize(n_freq);
  // One-sided scaling: sum(power) * df recovers the mean-removed variance
  // exactly for the rectangular window (Nyquist bin not doubled).
  const double base = 2.0 * tau_seconds /
                      (static_cast<double>(length) * taper_power *
                       static_cast<double>(n_segments));
  for (std::size_t k = 1; k <= n_freq; ++k) {
    spec.freq_hz[k - 1] = static_cast<double>(k) /
                          (static_cast<double>(length) * tau_seconds);
    const double scale = (k == n_freq) ? base / 2.0 : base;
    spec.power[k - 1] = accum[k - 1] * scale;
  }
  return spec;
}

SlopeFit slope_fit_xy(std::span<const double> x, std::span<const double> y,
                      double lo, double hi) {
  if (x.size() != y.size()) {
    throw ConfigError("slope_fit inputs must have equal length");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= lo && x[i] <= hi && x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log10(x[i]));
      ly.push_back(std::log10(y[i]));
    }
  }
  const std::size_t n = lx.size();
  if (n < 5) {
    throw DataError("slope fit needs at least 5 points with positive ordinate");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) {
    throw DataError("slope fit abscissae are degenerate");
  }
  SlopeFit fit;
  fit.n_points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = std::max(syy - fit.slope * sxy, 0.0);
  fit.std_error = n > 2 ? std::sqrt(ss_res / (static_cast<double>(n - 2) * sxx)) : 0.0;
  return fit;
}

SlopeFit slope_fit(const HistogramEstimate& h, double lo, double hi) {
  std::vector<double> centers(h.bins());
  for (std::size_t i = 0; i < h.bins(); ++i) {
    centers[i] = h.bin_center(i);
  }
  return slope_fit_xy(centers, h.density, lo, hi);
}

SlopeFit slope_fit(const SpectrumEstimate& s, double lo_hz, double hi_hz) {
  return slope_fit_xy(s.freq_hz, s.power, lo_hz, hi_hz);
}

HistogramEstimate ensemble_merge(const std::vector<HistogramEstimate>& parts) {
  if (parts.empty()) {
    throw DataError("nothing to merge");
  }
  HistogramEstimate merged = parts.front();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const auto& h = parts[p];
    if (h.bin_edges != merged.bin_edges) {
      throw DataError("histogram grid mismatch in merge");
    }
    for (std::size_t b = 0; b < merged.bins(); ++b) {
      merged.density[b] += h.density[b];
      merged.counts[b] += h.counts[b];
    }
    merged.total_count += h.total_count;
  }
  const auto n = static_cast<double>(parts.size());
  for (auto& d : merged.density) {
    d /= n;
  }
  return merged;
}

SpectrumEstimate ensemble_merge(const std::vector<SpectrumEstimate>& parts) {
  if (parts.empty()) {
    throw DataError("nothing to merge");
  }
  SpectrumEstimate merged = parts.front();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const auto& s = parts[p];
    if (s.freq_hz != merged.freq_hz || s.segment_length != merged.segment_length) {
      throw DataError("spectrum grid mismatch in merge");
    }
    for (std::size_t k = 0; k < merged.power.size(); ++k) {
      merged.power[k] += s.power[k];
    }
    merged.segments_averaged += s.segments_averaged;
  }
  const auto n = static_cast<double>(parts.size());
  for (auto& v : merged.power) {
    v /= n;
  }
  return merged;
}

double pdf_compare_metric(const HistogramEstimate& a, const HistogramEstimate& b,
                          std::uint64_t min_count) {
  const std::size_t shared = std::min(a.bins(), b.bins());
  for (std::size_t j = 0; j <= shared; ++j) {
    if (a.bin_edges[j] != b.bin_edges[j]) {
      throw DataError("histogram grids disagree on shared bins");
    }
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < shared; ++j) {
    if (a.counts[j] >= min_count && b.counts[j] >= min_count &&
        a.density[j] > 0.0 && b.density[j] > 0.0) {
      sum += std::abs(std::log10(a.density[j]) - std::log10(b.density[j]));
      ++n;
    }
  }
  if (n == 0) {
    throw DataError("no overlapping well-populated bins to compare");
  }
  return sum / static_cast<double>(n);
}

double psd_compare_metric(const SpectrumEstimate& a, const SpectrumEstimate& b,
                          double f_lo, double f_hi) {
  if (a.freq_hz != b.freq_hz) {
    throw DataError("spectrum frequency axes differ");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.freq_hz.size(); ++k) {
    const double f = a.freq_hz[k];
    if (f >= f_lo && f <= f_hi && a.power[k] > 0.0 && b.power[k] > 0.0) {
      sum += std::abs(std::log10(a.power[k]) - std::log10(b.power[k]));
      ++n;
    }
  }
  if (n == 0) {
    throw DataError("no overlapping spectrum points in the requested band");
  }
  return sum / static_cast<double>(n);
}

}  // namespace retssim
