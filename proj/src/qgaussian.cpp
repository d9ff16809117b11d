#include "retssim/qgaussian.hpp"

#include <cmath>

#include "retssim/errors.hpp"

namespace retssim {

void validate(const QGaussian& d) {
  if (!(d.r0 > 0.0)) {
    throw ConfigError("q-Gaussian scale r0 must be positive");
  }
  if (!(d.lambda > 1.0)) {
    throw ConfigError("q-Gaussian exponent lambda must exceed 1");
  }
}

double normalization(const QGaussian& d) {
  validate(d);
  const double log_ratio =
      std::lgamma(d.lambda / 2.0) - std::lgamma(d.lambda / 2.0 - 0.5);
  return std::exp(log_ratio) / (d.r0 * std::sqrt(M_PI));
}

double pdf(const QGaussian& d, double r) {
  const double norm = normalization(d);
  const double s = d.r0 * d.r0;
  return norm * std::pow(s / (s + r * r), d.lambda / 2.0);
}

double variance(const QGaussian& d) {
  validate(d);
  if (!(d.lambda > 3.0)) {
    throw ConfigError("q-Gaussian variance requires lambda > 3");
  }
  return d.r0 * d.r0 / (d.lambda - 3.0);
}

QGaussianSampler::QGaussianSampler(const QGaussian& d)
    : scale_(0.0), student_(d.lambda - 1.0) {
  validate(d);
  scale_ = d.r0 / std::sqrt(d.lambda - 1.0);
}

std::vector<double> sample(const QGaussian& d, std::size_t n, Engine& engine) {
  QGaussianSampler draw(d);
  std::vector<double> out(n);
  for (auto& v : out) {
    v = draw(engine);
  }
  return out;
}

}  // namespace retssim
