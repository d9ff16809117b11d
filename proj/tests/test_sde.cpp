#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "retssim/errors.hpp"
#include "retssim/sde.hpp"

#include "helpers.hpp"

using retssim::ModelParams;

namespace {
ModelParams defaults() { return ModelParams{}; }
}

TEST_CASE("parameter validation") {
  ModelParams p = defaults();
  p.kappa = 1.5;
  CHECK_THROWS_AS(retssim::validate(p), retssim::ConfigError);
  p.kappa = 0.0;
  CHECK_THROWS_AS(retssim::validate(p), retssim::ConfigError);
  p = defaults();
  p.x_max = -1.0;
  CHECK_THROWS_AS(retssim::validate(p), retssim::ConfigError);
  p = defaults();
  p.sigma_t_sq = 0.0;
  CHECK_THROWS_AS(retssim::validate(p), retssim::ConfigError);
  p = defaults();
  p.lambda = 1.0;
  CHECK_THROWS_AS(retssim::validate(p), retssim::ConfigError);
  CHECK_NOTHROW(retssim::validate(defaults()));
}

TEST_CASE("time scaling is the inverse pair") {
  const ModelParams p = defaults();
  CHECK(retssim::to_scaled_time(60.0, p) == doctest::Approx(2e-5).epsilon(1e-12));
  CHECK(retssim::to_physical_seconds(retssim::to_scaled_time(1234.5, p), p) ==
        doctest::Approx(1234.5).epsilon(1e-12));
}

TEST_CASE("drift point values") {
  const ModelParams p = defaults();
  CHECK(retssim::drift(0.0, p) == 0.0);
  // High-precision re-evaluations of the closed form at default parameters.
  CHECK(retssim::drift(1.0, p) ==
        doctest::Approx(1.88802259824047403).epsilon(1e-13));
  CHECK(retssim::drift(10.0, p) ==
        doctest::Approx(5182.2349889410661792).epsilon(1e-13));
  // At x = x_max sqrt(eta - lambda0/2) the restoring bracket vanishes; the
  // residual is pure floating-point cancellation noise.
  const double x_star = p.x_max * std::sqrt(p.eta - p.lambda0 / 2.0);
  CHECK(std::abs(retssim::drift(x_star, p)) < 1e-5);
  CHECK(std::abs(retssim::drift(x_star, p)) <
        1e-12 * std::abs(retssim::drift(0.9 * x_star, p)));
}

TEST_CASE("diffusion point values and parity") {
  const ModelParams p = defaults();
  CHECK(retssim::diffusion(0.0, p) ==
        doctest::Approx(0.98328416912487708948).epsilon(1e-14));
  CHECK(retssim::diffusion(10.0, p) ==
        doctest::Approx(273.46467957202734147).epsilon(1e-13));
  for (const double x : {0.1, 3.7, 250.0}) {
    CHECK(retssim::diffusion(x, p) == retssim::diffusion(-x, p));
  }
}

TEST_CASE("step size point values and monotonicity") {
  ModelParams p = defaults();
  CHECK(retssim::step_size(0.0, p) ==
        doctest::Approx(0.01034289).epsilon(1e-14));
  p.kappa = 0.5;
  p.epsilon = 0.0;
  CHECK(retssim::step_size(0.0, p) == doctest::Approx(0.25).epsilon(1e-15));
  p = defaults();
  double prev = retssim::step_size(0.0, p);
  for (double x = 0.5; x < 2000.0; x *= 1.7) {
    const double h = retssim::step_size(x, p);
    CHECK(h > 0.0);
    CHECK(h <= prev);
    prev = h;
  }
}

TEST_CASE("scheme identities collapse the update to its simple form") {
  const ModelParams p = defaults();
  std::mt19937_64 engine(4242);
  std::uniform_real_distribution<double> log_mag(-6.0, 4.0);
  std::bernoulli_distribution sign(0.5);
  for (int i = 0; i < 10000; ++i) {
    const double x = (sign(engine) ? 1.0 : -1.0) * std::pow(10.0, log_mag(engine));
    const double h = retssim::step_size(x, p);
    const double bracket = p.eta - p.lambda0 / 2.0 - (x / p.x_max) * (x / p.x_max);
    const double lhs1 = retssim::drift(x, p) * h;
    const double rhs1 = p.kappa * p.kappa * bracket * x;
    CHECK(std::abs(lhs1 - rhs1) <=
          1e-12 * std::max({std::abs(lhs1), std::abs(rhs1), 1e-300}));
    const double lhs2 = retssim::diffusion(x, p) * std::sqrt(h);
    const double rhs2 = p.kappa * std::sqrt(1.0 + x * x);
    CHECK(std::abs(lhs2 - rhs2) <= 1e-12 * rhs2);
  }
}

TEST_CASE("update rule point values") {
  const ModelParams p = defaults();
  CHECK(retssim::step(0.0, 0.0, p) == 0.0);
  CHECK(retssim::step(1.0, 0.0, p) ==
        doctest::Approx(1.00699999).epsilon(1e-12));
  // The origin is unstable for eta > lambda0/2: noiseless multiplier > 1.
  CHECK(retssim::step(1e-8, 0.0, p) > 1e-8);
}

TEST_CASE("literal update drops the leading term") {
  ModelParams p = defaults();
  p.literal_update = true;
  // kappa^2 * (0.7 - 1e-6) * 1 alone, without the + x_k.
  CHECK(retssim::step(1.0, 0.0, p) ==
        doctest::Approx(0.00699999).epsilon(1e-10));
}

TEST_CASE("update is equivariant under joint sign flip") {
  const ModelParams p = defaults();
  std::mt19937_64 engine(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> xs(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = xs(engine);
    const double z = normal(engine);
    CHECK(retssim::step(-x, -z, p) == -retssim::step(x, z, p));
  }
}

TEST_CASE("update clamps at ten times x_max") {
  ModelParams p = defaults();
  bool clamped = false;
  const double out = retssim::step(9999.0, 50.0, p, &clamped);
  CHECK(clamped);
  CHECK(out == 10000.0);
  clamped = false;
  retssim::step(1.0, 0.1, p, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("trajectory gaps equal the step size at the left endpoint") {
  ModelParams p = defaults();
  p.burn_in_scaled_time = 10.0;
  retssim::Engine engine(retssim::derive_seed(40, 0));
  const retssim::Trajectory traj = retssim::simulate(p, 200.0, engine);
  REQUIRE(traj.times_scaled.size() == traj.values.size());
  REQUIRE(traj.values.size() > 100);
  CHECK(traj.times_scaled.front() == 0.0);
  CHECK(traj.duration_scaled() >= 200.0);
  for (std::size_t i = 0; i + 1 < traj.values.size(); ++i) {
    CHECK(traj.times_scaled[i + 1] > traj.times_scaled[i]);
    // The recorded gap is the float sum actually performed.
    CHECK(traj.times_scaled[i + 1] ==
          traj.times_scaled[i] + retssim::step_size(traj.values[i], p));
    CHECK(std::isfinite(traj.values[i]));
  }
}

TEST_CASE("simulation is bit-reproducible under a fixed seed") {
  ModelParams p = defaults();
  p.burn_in_scaled_time = 5.0;
  retssim::Engine e1(99), e2(99);
  const auto a = retssim::simulate(p, 50.0, e1);
  const auto b = retssim::simulate(p, 50.0, e2);
  CHECK(a.values == b.values);
  CHECK(a.times_scaled == b.times_scaled);
  retssim::Engine e3(100);
  const auto c = retssim::simulate(p, 50.0, e3);
  CHECK(a.values != c.values);
}

TEST_CASE("|x| statistics are seed- and sign-stable") {
  // Two runs with different seeds and opposite starting signs: the |x| laws
  // agree to Kolmogorov distance < 0.02 at one million retained samples.
  ModelParams p = defaults();
  p.burn_in_scaled_time = 100.0;
  auto collect = [&](std::uint64_t seed, double x0) {
    ModelParams q = p;
    q.x0 = x0;
    retssim::Engine engine(retssim::derive_seed(seed, 0));
    std::vector<double> abs_x;
    abs_x.reserve(1000000);
    std::uint64_t i = 0;
    retssim::for_each_step(q, 16000000, engine, [&](double x, double) {
      if (i++ % 16 == 0) {
        abs_x.push_back(std::abs(x));
      }
    });
    return abs_x;
  };
  const auto a = collect(11, 1.0);
  const auto b = collect(22, -1.0);
  CHECK(testutil::ks_distance(a, b) < 0.02);
}

TEST_CASE("runaway clamping fails the run") {
  ModelParams p = defaults();
  p.x_max = 1e-3;  // clamp at |x| = 0.01 with unit-scale noise every step
  p.burn_in_scaled_time = 0.0;
  retssim::Engine engine(5);
  CHECK_THROWS_AS(retssim::simulate(p, 10.0, engine), retssim::ThresholdError);
}

TEST_CASE("degenerate mode pins x to zero and consumes no randomness") {
  ModelParams p = defaults();
  p.degenerate_x = true;
  retssim::Engine engine(1), untouched(1);
  const auto traj = retssim::simulate(p, 5.0, engine);
  CHECK(engine == untouched);
  REQUIRE(traj.values.size() > 10);
  for (const double v : traj.values) {
    CHECK(v == 0.0);
  }
  const double h = retssim::step_size(0.0, p);
  for (std::size_t i = 0; i + 1 < traj.times_scaled.size(); ++i) {
    CHECK(traj.times_scaled[i + 1] - traj.times_scaled[i] ==
          doctest::Approx(h).epsilon(1e-12));
  }
}

TEST_CASE("streaming iteration matches the recorded trajectory") {
  ModelParams p = defaults();
  p.burn_in_scaled_time = 5.0;
  retssim::Engine e1(123), e2(123);
  const auto traj = retssim::simulate(p, 20.0, e1);
  std::vector<double> streamed;
  retssim::for_each_step(p, traj.values.size() - 1, e2,
                         [&](double x, double) { streamed.push_back(x); });
  REQUIRE(streamed.size() == traj.values.size() - 1);
  for (std::size_t i = 0; i < streamed.size(); ++i) {
    CHECK(streamed[i] == traj.values[i]);
  }
}

TEST_CASE("uniform resampling") {
  const ModelParams p = defaults();

  SUBCASE("constant path stays constant") {
    retssim::Trajectory traj;
    traj.params = p;
    const double c = 3.25;
    for (int i = 0; i <= 20; ++i) {
      traj.times_scaled.push_back(0.1 * i);
      traj.values.push_back(c);
    }
    for (const double v : retssim::resample_uniform(traj, 0.037)) {
      CHECK(v == c);
    }
  }

  SUBCASE("native spacing reproduces the values") {
    retssim::Trajectory traj;
    traj.params = p;
    std::mt19937_64 engine(8);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double h = 0.25;
    for (int i = 0; i <= 50; ++i) {
      traj.times_scaled.push_back(h * i);
      traj.values.push_back(normal(engine));
    }
    const auto out = retssim::resample_uniform(traj, h);
    REQUIRE(out.size() == traj.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i] == traj.values[i]);
    }
  }

  SUBCASE("windowed integral error stays within two cells") {
    // Monotone positive path so the bound 2*dt/T is mathematically implied.
    retssim::Trajectory traj;
    traj.params = p;
    double t = 0.0;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      const double x = 1.0 + static_cast<double>(i) / n;
      traj.times_scaled.push_back(t);
      traj.values.push_back(x);
      t += retssim::step_size(x, p);
    }
    const double span = traj.times_scaled.back();
    const double dt = span / 5000.0;
    const auto out = retssim::resample_uniform(traj, dt);
    double riemann = 0.0;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      riemann += out[i] * dt;
    }
    const double covered = dt * static_cast<double>(out.size() - 1);
    // Exact hold-left integral over the same span.
    double exact = 0.0;
    for (std::size_t j = 0; j + 1 < traj.values.size(); ++j) {
      const double hi = std::min(traj.times_scaled[j + 1], covered);
      if (hi <= traj.times_scaled[j]) {
        break;
      }
      exact += traj.values[j] * (hi - traj.times_scaled[j]);
    }
    CHECK(std::abs(riemann - exact) / exact < 2.0 * dt / covered);
  }

  SUBCASE("rejects bad inputs") {
    retssim::Trajectory empty;
    CHECK_THROWS_AS(retssim::resample_uniform(empty, 0.1), retssim::DataError);
    retssim::Trajectory one;
    one.times_scaled = {0.0};
    one.values = {1.0};
    CHECK_THROWS_AS(retssim::resample_uniform(one, 0.0), retssim::ConfigError);
  }
}
