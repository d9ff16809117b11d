#pragma once

#include <vector>

#include "retssim/qgaussian.hpp"
#include "retssim/rng.hpp"
#include "retssim/sde.hpp"
#include "retssim/series.hpp"

namespace retssim {

// Windowed volatility: 1 + (r0_bar / tau_s) * |integral of x(s) ds| over
// [t_start, t_start + tau_s], the integral taken exactly on the
// piecewise-constant path. Always >= 1. Throws DataError if the window is not
// inside the trajectory support.
double volatility_window(const Trajectory& traj, double t_start_scaled,
                         double tau_scaled, double r0_bar);

// volatility_window evaluated on consecutive non-overlapping windows
// starting at the trajectory start; one exact pass over the path.
std::vector<double> window_volatilities(const Trajectory& traj,
                                        double tau_scaled, double r0_bar);

// One signed q-Gaussian draw per consecutive non-overlapping window of
// physical length tau_seconds (scaled length sigma_t_sq * tau_seconds), with
// the scale r0 of each draw given by volatility_window. Throws DataError if
// the trajectory does not cover at least one window.
ReturnSeries generate_returns(const Trajectory& traj, const ModelParams& p,
                              double tau_seconds, Engine& engine);

struct NormalizeResult {
  ReturnSeries series;
  double dispersion = 0.0;  // the standard deviation divided out
};

// Divides every value by the standard deviation of the full series (zeros
// included) and sets the normalized flag. Idempotent. Throws DataError for
// fewer than 2 values or zero variance.
NormalizeResult normalize(const ReturnSeries& series);

// Same, but the dispersion is estimated from non-zero-flagged values only
// (used for sparse empirical series so they arrive at the same normalization
// as dense ones).
NormalizeResult normalize_excluding_zeros(const ReturnSeries& series);

}  // namespace retssim
