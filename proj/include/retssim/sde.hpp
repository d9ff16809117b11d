#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "retssim/errors.hpp"
#include "retssim/rng.hpp"

namespace retssim {

// Parameters of the nonlinear stochastic model for the average return per
// unit time x, written in scaled dimensionless time t_s = sigma_t_sq * t.
struct ModelParams {
  double eta = 2.5;           // multiplicativity exponent
  double lambda0 = 3.6;       // stationary-density tail exponent of x
  double epsilon = 0.017;     // diffusion-regime divider
  double x_max = 1000.0;      // soft upper limit of the diffusion
  double sigma_t_sq = 1.0 / 3.0e6;  // scaled-time conversion, 1/seconds
  double r0_bar = 0.4;        // windowed-volatility amplitude
  double lambda = 5.0;        // return-distribution tail exponent
  double kappa = 0.1;         // integration precision, in (0, 1)
  std::uint64_t seed = 1;
  double burn_in_scaled_time = 1.0e4;
  double x0 = 1.0;
  // Degenerate mode: the latent process is pinned to x == 0, so every
  // volatility window evaluates to r0 == 1 and returns are i.i.d.
  bool degenerate_x = false;
  // Use the literal update x_{k+1} = kappa^2 [...] x_k + kappa sqrt(1+x_k^2) z
  // (no leading x_k term) instead of the integrating form. Comparison only.
  bool literal_update = false;
  // A run fails if more than this fraction of steps hit the overflow clamp.
  double clamp_fail_fraction = 1.0e-4;
};

// Throws ConfigError if kappa is outside (0, 1) or any positivity constraint
// is violated.
void validate(const ModelParams& p);

double to_scaled_time(double t_seconds, const ModelParams& p);
double to_physical_seconds(double t_scaled, const ModelParams& p);

// Deterministic term of the scaled-time equation of motion:
//   [eta - lambda0/2 - (x/x_max)^2] * (1+x^2)^(eta-1) / (eps sqrt(1+x^2)+1)^2 * x
double drift(double x, const ModelParams& p);

// Noise coefficient: (1+x^2)^(eta/2) / (eps sqrt(1+x^2) + 1).
double diffusion(double x, const ModelParams& p);

// State-dependent step: kappa^2 (eps sqrt(1+x^2)+1)^2 / (1+x^2)^(eta-1).
// Chosen so that drift*h and diffusion*sqrt(h) collapse to the simple update.
double step_size(double x, const ModelParams& p);

// One update with standard-normal innovation zeta; the result is clamped to
// |x| <= 10 * x_max as an overflow guard (a single large zeta can overshoot
// the soft restoring term). If clamped is non-null it is set accordingly.
double step(double x, double zeta, const ModelParams& p, bool* clamped = nullptr);

// Piecewise-constant sample path: x(s) = values[k] on
// [times_scaled[k], times_scaled[k+1]). Every gap equals step_size at the
// left endpoint.
struct Trajectory {
  std::vector<double> times_scaled;
  std::vector<double> values;
  ModelParams params;
  std::uint64_t clamp_count = 0;
  std::uint64_t steps_total = 0;  // including burn-in

  double duration_scaled() const {
    return times_scaled.empty() ? 0.0 : times_scaled.back() - times_scaled.front();
  }
};

// Integrates the model for burn_in + duration of scaled time, discards the
// burn-in prefix and returns the rest (times re-based to 0). Bit-identical
// for identical (params, seed, duration). Throws ThresholdError if the
// clamped-step fraction exceeds clamp_fail_fraction.
Trajectory simulate(const ModelParams& p, double duration_scaled, Engine& engine);

// Streaming variant for long runs: after the burn-in, performs exactly
// n_steps updates and calls sink(x_k, h_k) with the state at the left
// endpoint of each step, so h_k is the hold time of x_k. Returns the number
// of clamped steps over the whole run (throws like simulate on budget
// violation).
template <class Sink>
std::uint64_t for_each_step(const ModelParams& p, std::uint64_t n_steps,
                            Engine& engine, Sink&& sink) {
  validate(p);
  std::normal_distribution<double> normal(0.0, 1.0);
  double x = p.degenerate_x ? 0.0 : p.x0;
  std::uint64_t clamps = 0, total = 0;
  double t = 0.0;
  while (t < p.burn_in_scaled_time) {
    const double h = step_size(x, p);
    bool clamped = false;
    x = step(x, p.degenerate_x ? 0.0 : normal(engine), p, &clamped);
    clamps += clamped;
    ++total;
    t += h;
  }
  for (std::uint64_t k = 0; k < n_steps; ++k) {
    const double h = step_size(x, p);
    sink(x, h);
    bool clamped = false;
    x = step(x, p.degenerate_x ? 0.0 : normal(engine), p, &clamped);
    clamps += clamped;
    ++total;
  }
  if (total > 0 &&
      static_cast<double>(clamps) > p.clamp_fail_fraction * static_cast<double>(total)) {
    throw ThresholdError("clamped-step fraction exceeds budget");
  }
  return clamps;
}

// Hold-left resampling of the piecewise-constant path onto a uniform grid
// with spacing dt_scaled, starting at the trajectory start.
std::vector<double> resample_uniform(const Trajectory& traj, double dt_scaled);

}  // namespace retssim
