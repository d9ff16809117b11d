#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "retssim/rng.hpp"

namespace retssim {

// Heavy-tailed distribution of instantaneous return fluctuations:
//   pdf(r) = G(l/2) / (r0 sqrt(pi) G(l/2 - 1/2)) * (r0^2 / (r0^2 + r^2))^(l/2)
// with scale r0 > 0 and tail exponent lambda > 1. Equivalent to a Student-t
// with nu = lambda - 1 degrees of freedom scaled by r0 / sqrt(nu).
struct QGaussian {
  double r0 = 1.0;
  double lambda = 5.0;
};

// Throws ConfigError unless r0 > 0 and lambda > 1 (density not normalizable
// otherwise).
void validate(const QGaussian& d);

double normalization(const QGaussian& d);
double pdf(const QGaussian& d, double r);

// r0^2 / (lambda - 3); requires lambda > 3 (infinite otherwise).
double variance(const QGaussian& d);

// Exact sampler via the Student-t identity: T ~ t(nu = lambda - 1),
// return r0 * T / sqrt(nu).
class QGaussianSampler {
 public:
  explicit QGaussianSampler(const QGaussian& d);

  template <class URBG>
  double operator()(URBG& g) {
    return scale_ * student_(g);
  }

 private:
  double scale_;
  std::student_t_distribution<double> student_;
};

std::vector<double> sample(const QGaussian& d, std::size_t n, Engine& engine);

}  // namespace retssim
