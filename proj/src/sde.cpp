#include "retssim/sde.hpp"

#include <cmath>

namespace retssim {

void validate(const ModelParams& p) {
  if (!(p.kappa > 0.0 && p.kappa < 1.0)) {
    throw ConfigError("kappa must lie in (0, 1)");
  }
  if (!(p.x_max > 0.0)) {
    throw ConfigError("x_max must be positive");
  }
  if (!(p.sigma_t_sq > 0.0)) {
    throw ConfigError("sigma_t_sq must be positive");
  }
  if (!(p.r0_bar > 0.0)) {
    throw ConfigError("r0_bar must be positive");
  }
  if (!(p.lambda > 1.0)) {
    throw ConfigError("lambda must exceed 1");
  }
  if (!(p.burn_in_scaled_time >= 0.0)) {
    throw ConfigError("burn-in must be non-negative");
  }
  if (!(p.clamp_fail_fraction >= 0.0)) {
    throw ConfigError("clamp budget must be non-negative");
  }
}

double to_scaled_time(double t_seconds, const ModelParams& p) {
  return t_seconds * p.sigma_t_sq;
}

double to_physical_seconds(double t_scaled, const ModelParams& p) {
  return t_scaled / p.sigma_t_sq;
}

double drift(double x, const ModelParams& p) {
  const double one_plus = 1.0 + x * x;
  const double divider = p.epsilon * std::sqrt(one_plus) + 1.0;
  const double ratio = x / p.x_max;
  const double bracket = p.eta - p.lambda0 / 2.0 - ratio * ratio;
  return bracket * std::pow(one_plus, p.eta - 1.0) / (divider * divider) * x;
}

double diffusion(double x, const ModelParams& p) {
  const double one_plus = 1.0 + x * x;
  const double divider = p.epsilon * std::sqrt(one_plus) + 1.0;
  return std::pow(one_plus, p.eta / 2.0) / divider;
}

double step_size(double x, const ModelParams& p) {
  const double one_plus = 1.0 + x * x;
  const double divider = p.epsilon * std::sqrt(one_plus) + 1.0;
  return p.kappa * p.kappa * divider * divider / std::pow(one_plus, p.eta - 1.0);
}

double step(double x, double zeta, const ModelParams& p, bool* clamped) {
  const double ratio = x / p.x_max;
  const double bracket = p.eta - p.lambda0 / 2.0 - ratio * ratio;
  const double deterministic = p.kappa * p.kappa * bracket * x;
  const double noise = p.kappa * std::sqrt(1.0 + x * x) * zeta;
  double next = p.literal_update ? deterministic + noise : x + deterministic + noise;
  const double limit = 10.0 * p.x_max;
  bool hit = false;
  if (next > limit) {
    next = limit;
    hit = true;
  } else if (next < -limit) {
    next = -limit;
    hit = true;
  }
  if (clamped != nullptr) {
    *clamped = hit;
  }
  return next;
}

Trajectory simulate(const ModelParams& p, double duration_scaled, Engine& engine) {
  validate(p);
  if (!(duration_scaled > 0.0)) {
    throw ConfigError("simulation duration must be positive");
  }
  Trajectory traj;
  traj.params = p;

  if (p.degenerate_x) {
    // Pinned latent process: x == 0 on an equidistant grid of native steps.
    const double h = step_size(0.0, p);
    const auto n = static_cast<std::uint64_t>(std::ceil(duration_scaled / h));
    traj.times_scaled.reserve(n + 1);
    traj.values.assign(n + 1, 0.0);
    for (std::uint64_t k = 0; k <= n; ++k) {
      traj.times_scaled.push_back(static_cast<double>(k) * h);
    }
    traj.steps_total = n;
    return traj;
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  double x = p.x0;
  double t = 0.0;
  while (t < p.burn_in_scaled_time) {
    const double h = step_size(x, p);
    bool clamped = false;
    x = step(x, normal(engine), p, &clamped);
    traj.clamp_count += clamped;
    ++traj.steps_total;
    t += h;
  }

  t = 0.0;
  traj.times_scaled.push_back(t);
  traj.values.push_back(x);
  while (t < duration_scaled) {
    const double h = step_size(x, p);
    bool clamped = false;
    x = step(x, normal(engine), p, &clamped);
    traj.clamp_count += clamped;
    ++traj.steps_total;
    t += h;
    traj.times_scaled.push_back(t);
    traj.values.push_back(x);
  }

  if (traj.steps_total > 0 &&
      static_cast<double>(traj.clamp_count) >
          p.clamp_fail_fraction * static_cast<double>(traj.steps_total)) {
    throw ThresholdError("clamped-step fraction exceeds budget");
  }
  return traj;
}

std::vector<double> resample_uniform(const Trajectory& traj, double dt_scaled) {
  if (!(dt_scaled > 0.0)) {
    throw ConfigError("resampling step must be positive");
  }
  if (traj.values.empty()) {
    throw DataError("cannot resample an empty trajectory");
  }
  const double t0 = traj.times_scaled.front();
  const double t_end = traj.times_scaled.back();
  std::vector<double> out;
  std::size_t k = 0;  // segment index: x = values[k] on [times[k], times[k+1])
  const std::size_t last = traj.values.size() - 1;
  for (std::uint64_t i = 0;; ++i) {
    const double t = t0 + static_cast<double>(i) * dt_scaled;
    if (t > t_end) {
      break;
    }
    while (k < last && traj.times_scaled[k + 1] <= t) {
      ++k;
    }
    out.push_back(traj.values[k]);
  }
  return out;
}

}  // namespace retssim
