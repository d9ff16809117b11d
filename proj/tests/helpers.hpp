#pragma once

// Shared test utilities: quadrature, goodness-of-fit statistics, temp dirs,
// CLI subprocess runner, and synthetic tick-file builders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "retssim/csv_io.hpp"
#include "retssim/empirics.hpp"
#include "retssim/qgaussian.hpp"

namespace testutil {

// ---------------------------------------------------------------- quadrature

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1.0e-11,
                               int max_depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Total probability mass of the heavy-tailed density by quadrature on the
// compactifying substitution u = r / sqrt(r0^2 + r^2), u in [0, 1).
inline double density_total_mass(const retssim::QGaussian& d) {
  auto integrand = [&](double u) {
    const double one_minus = 1.0 - u * u;
    const double r = d.r0 * u / std::sqrt(one_minus);
    const double jac = d.r0 / (one_minus * std::sqrt(one_minus));
    return retssim::pdf(d, r) * jac;
  };
  return 2.0 * adaptive_simpson(integrand, 0.0, 1.0 - 1.0e-9);
}

// ---------------------------------------------------------------- statistics

inline double chi2_pvalue(double statistic, double dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

// One-sample goodness of fit against expected counts; dof = bins - 1 - n_fit.
inline double chi2_gof_pvalue(const std::vector<double>& observed,
                              const std::vector<double>& expected,
                              int n_fitted = 0) {
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      continue;
    }
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
    ++used;
  }
  return chi2_pvalue(stat, used - 1 - n_fitted);
}

// Two-sample binned comparison with unequal totals (Numerical Recipes
// weighting); dof = used bins - 1.
inline double chi2_two_sample_pvalue(const std::vector<double>& a,
                                     const std::vector<double>& b) {
  double na = 0.0, nb = 0.0;
  for (const double v : a) na += v;
  for (const double v : b) nb += v;
  const double ra = std::sqrt(nb / na);
  const double rb = std::sqrt(na / nb);
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] <= 0.0) {
      continue;
    }
    const double d = ra * a[i] - rb * b[i];
    stat += d * d / (a[i] + b[i]);
    ++used;
  }
  return chi2_pvalue(stat, used - 1);
}

// Goodness of fit of signed samples against the heavy-tailed density: 50
// log-spaced |r| bins on [1e-2, 10] plus underflow/overflow cells, expected
// masses from the scaled Student-t CDF.
inline double sampler_chi2_pvalue(const retssim::QGaussian& d,
                                  const std::vector<double>& samples) {
  const double nu = d.lambda - 1.0;
  const double scale = d.r0 / std::sqrt(nu);
  boost::math::students_t t_dist(nu);
  auto cdf_abs = [&](double v) {
    return 2.0 * boost::math::cdf(t_dist, v / scale) - 1.0;
  };
  constexpr int kBins = 50;
  std::vector<double> edges(kBins + 1);
  for (int i = 0; i <= kBins; ++i) {
    edges[i] = std::pow(10.0, -2.0 + 3.0 * i / static_cast<double>(kBins));
  }
  std::vector<double> observed(kBins + 2, 0.0);
  for (const double s : samples) {
    const double v = std::abs(s);
    if (v < edges.front()) {
      observed.front() += 1.0;
    } else if (v >= edges.back()) {
      observed.back() += 1.0;
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      observed[static_cast<std::size_t>(it - edges.begin())] += 1.0;
    }
  }
  const auto n = static_cast<double>(samples.size());
  std::vector<double> expected(kBins + 2);
  expected.front() = n * cdf_abs(edges.front());
  expected.back() = n * (1.0 - cdf_abs(edges.back()));
  for (int i = 0; i < kBins; ++i) {
    expected[static_cast<std::size_t>(i) + 1] =
        n * (cdf_abs(edges[i + 1]) - cdf_abs(edges[i]));
  }
  return chi2_gof_pvalue(observed, expected);
}

inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

// -------------------------------------------------------------- temp dir, CLI

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    char tmpl[] = "/tmp/retssim_test_XXXXXX";
    const char* made = ::mkdtemp(tmpl);
    if (made == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path = made;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::filesystem::path operator/(const std::string& name) const {
    return path / name;
  }
};

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// Runs the command-line tool with `args` in `workdir`, capturing both streams.
// `env_prefix` may hold NAME=value assignments placed before the binary.
inline CliResult run_cli(const std::string& args,
                         const std::filesystem::path& workdir,
                         const std::string& env_prefix = "") {
  const std::filesystem::path log = workdir / ".cli_output.txt";
  std::string cmd = "cd '" + workdir.string() + "' && " +
                    (env_prefix.empty() ? "" : env_prefix + " ") +
                    "'" RETSSIM_CLI_PATH "' " +
                    args + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  CliResult result;
  if (WIFEXITED(rc)) {
    result.exit_code = WEXITSTATUS(rc);
  }
  std::ifstream f(log);
  std::ostringstream ss;
  ss << f.rdbuf();
  result.output = ss.str();
  std::error_code ec;
  std::filesystem::remove(log, ec);
  return result;
}

// ------------------------------------------------------------- tick building

// 2024-01-01 was a Monday; trading days index Mon..Fri weeks from there.
inline std::int64_t trading_day_to_civil_days(std::int64_t trading_day) {
  static const std::int64_t monday = retssim::days_from_civil(2024, 1, 1);
  return monday + (trading_day / 5) * 7 + (trading_day % 5);
}

inline std::vector<double> price_path(const std::vector<double>& returns,
                                      double scale, double p0 = 100.0) {
  std::vector<double> prices;
  prices.reserve(returns.size() + 1);
  double log_p = std::log(p0);
  prices.push_back(p0);
  for (const double r : returns) {
    log_p += scale * r;
    prices.push_back(std::exp(log_p));
  }
  return prices;
}

// One tick at every tau boundary of every 24 h weekday session; the first
// boundary of a day repeats the last price of the previous day, so each
// return is consumed exactly once by the grid pipeline. tau must divide 86400.
inline void write_dense_ticks(const std::filesystem::path& path,
                              const std::string& symbol,
                              const std::vector<double>& prices,
                              double tau_seconds) {
  const auto tau_ms = static_cast<std::int64_t>(tau_seconds * 1000.0);
  const std::int64_t per_day = 86400000 / tau_ms;
  std::vector<std::int64_t> ts;
  std::vector<double> px;
  std::size_t idx = 0;  // price index at the day's first boundary
  for (std::int64_t day = 0; idx + 1 < prices.size(); ++day) {
    const std::int64_t day_start_ms =
        trading_day_to_civil_days(day) * 86400000;
    const auto n = std::min<std::int64_t>(
        per_day, static_cast<std::int64_t>(prices.size() - 1 - idx));
    for (std::int64_t k = 0; k < n; ++k) {
      ts.push_back(day_start_ms + k * tau_ms);
      px.push_back(prices[idx + static_cast<std::size_t>(k)]);
    }
    // Trade the closing price one ms before the close so no tick lands on
    // the next session's (inclusive) opening boundary.
    ts.push_back(day_start_ms + n * tau_ms - 1);
    px.push_back(prices[idx + static_cast<std::size_t>(n)]);
    idx += static_cast<std::size_t>(n);
  }
  retssim::write_ticks_csv(path, symbol, ts, px);
}

// Poisson trade arrivals (mean gap mean_gap_seconds) sampling the same
// latent boundary-price path via previous-tick lookup.
inline void write_poisson_ticks(const std::filesystem::path& path,
                                const std::string& symbol,
                                const std::vector<double>& prices,
                                double tau_seconds, double mean_gap_seconds,
                                std::uint64_t seed) {
  const auto tau_ms = static_cast<std::int64_t>(tau_seconds * 1000.0);
  const std::int64_t per_day = 86400000 / tau_ms;
  std::mt19937_64 engine(seed);
  std::exponential_distribution<double> gap(1.0 / (mean_gap_seconds * 1000.0));
  std::vector<std::int64_t> ts;
  std::vector<double> px;
  std::size_t idx = 0;
  for (std::int64_t day = 0; idx + 1 < prices.size(); ++day) {
    const std::int64_t day_start_ms =
        trading_day_to_civil_days(day) * 86400000;
    const auto n = std::min<std::int64_t>(
        per_day, static_cast<std::int64_t>(prices.size() - 1 - idx));
    const std::int64_t day_end_ms = day_start_ms + n * tau_ms;
    double t = static_cast<double>(day_start_ms);
    while (true) {
      t += gap(engine);
      if (t >= static_cast<double>(day_end_ms)) {
        break;
      }
      const auto offset = static_cast<std::int64_t>(
          (static_cast<std::int64_t>(t) - day_start_ms) / tau_ms);
      ts.push_back(static_cast<std::int64_t>(t));
      px.push_back(prices[idx + static_cast<std::size_t>(offset)]);
    }
    idx += static_cast<std::size_t>(n);
  }
  retssim::write_ticks_csv(path, symbol, ts, px);
}

}  // namespace testutil
