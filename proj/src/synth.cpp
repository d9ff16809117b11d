#include "retssim/synth.hpp"

#include <algorithm>
#include <cmath>

#include "retssim/errors.hpp"

namespace retssim {

namespace {

// Exact integral of the hold-left path over [a, b]. The cursor k is only a
// search hint: the walk first relocates to the segment containing a, so the
// result is bit-identical no matter where k starts. Leaves k at the segment
// containing b.
double integrate_window(const std::vector<double>& t, const std::vector<double>& x,
                        double a, double b, std::size_t& k) {
  double sum = 0.0;
  const std::size_t last = x.size() - 1;
  while (k > 0 && t[k] > a) {
    --k;
  }
  while (k < last && t[k + 1] <= a) {
    ++k;
  }
  for (std::size_t j = k;; ++j) {
    if (j >= last) {
      // b coincides with (or numerically overshoots into) the final grid
      // point; the last value holds on a zero-length interval only.
      const double lo = std::max(t[j], a);
      if (b > lo) {
        sum += x[j] * (b - lo);
      }
      k = j;
      break;
    }
    const double lo = std::max(t[j], a);
    const double hi = std::min(t[j + 1], b);
    if (hi > lo) {
      sum += x[j] * (hi - lo);
    }
    if (t[j + 1] >= b) {
      k = j;
      break;
    }
  }
  return sum;
}

}  // namespace

double volatility_window(const Trajectory& traj, double t_start_scaled,
                         double tau_scaled, double r0_bar) {
  if (!(tau_scaled > 0.0)) {
    throw ConfigError("window length must be positive");
  }
  if (traj.values.empty()) {
    throw DataError("empty trajectory");
  }
  const double t0 = traj.times_scaled.front();
  const double t_end = traj.times_scaled.back();
  const double slack = 1.0e-12 * (1.0 + std::abs(t_end));
  if (t_start_scaled < t0 - slack || t_start_scaled + tau_scaled > t_end + slack) {
    throw DataError("volatility window outside trajectory support");
  }
  std::size_t cursor = 0;
  const double integral = integrate_window(traj.times_scaled, traj.values,
                                           t_start_scaled,
                                           t_start_scaled + tau_scaled, cursor);
  return 1.0 + r0_bar / tau_scaled * std::abs(integral);
}

std::vector<double> window_volatilities(const Trajectory& traj,
                                        double tau_scaled, double r0_bar) {
  if (!(tau_scaled > 0.0)) {
    throw ConfigError("window length must be positive");
  }
  if (traj.values.empty()) {
    throw DataError("empty trajectory");
  }
  const double t0 = traj.times_scaled.front();
  const double span = traj.times_scaled.back() - t0;
  const auto n_windows = static_cast<std::size_t>(span / tau_scaled);
  std::vector<double> out;
  out.reserve(n_windows);
  std::size_t cursor = 0;
  for (std::size_t w = 0; w < n_windows; ++w) {
    const double a = t0 + static_cast<double>(w) * tau_scaled;
    // b must be a + tau (not t0 + (w+1) * tau) so every window reproduces a
    // standalone volatility_window(traj, a, tau, ...) call bit for bit.
    const double b = a + tau_scaled;
    const double integral =
        integrate_window(traj.times_scaled, traj.values, a, b, cursor);
    out.push_back(1.0 + r0_bar / tau_scaled * std::abs(integral));
  }
  return out;
}

ReturnSeries generate_returns(const Trajectory& traj, const ModelParams& p,
                              double tau_seconds, Engine& engine) {
  if (!(tau_seconds > 0.0)) {
    throw ConfigError("tau must be positive");
  }
  const double tau_scaled = to_scaled_time(tau_seconds, p);
  const std::vector<double> vols = window_volatilities(traj, tau_scaled, p.r0_bar);
  if (vols.empty()) {
    throw DataError("trajectory shorter than one window");
  }
  // One unit-scale draw per window, stretched by that window's volatility.
  QGaussianSampler draw(QGaussian{1.0, p.lambda});

  ReturnSeries series;
  series.tau_seconds = tau_seconds;
  series.start_time_seconds = 0.0;
  series.values.reserve(vols.size());
  for (const double r0 : vols) {
    series.values.push_back(r0 * draw(engine));
  }
  return series;
}

namespace {

NormalizeResult normalize_impl(const ReturnSeries& series, bool dispersion_excludes_zeros) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (dispersion_excludes_zeros && series.zero_flag(i)) {
      continue;
    }
    sum += series.values[i];
    ++n;
  }
  if (n < 2) {
    throw DataError("normalization needs at least two values");
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (dispersion_excludes_zeros && series.zero_flag(i)) {
      continue;
    }
    const double d = series.values[i] - mean;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / static_cast<double>(n));
  if (!(sigma > 0.0)) {
    throw DataError("cannot normalize a zero-variance series");
  }
  NormalizeResult result;
  result.dispersion = sigma;
  result.series = series;
  for (auto& v : result.series.values) {
    v /= sigma;
  }
  result.series.normalized = true;
  return result;
}

}  // namespace

NormalizeResult normalize(const ReturnSeries& series) {
  return normalize_impl(series, false);
}

NormalizeResult normalize_excluding_zeros(const ReturnSeries& series) {
  return normalize_impl(series, true);
}

}  // namespace retssim
