#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "retssim/csv_io.hpp"
#include "retssim/errors.hpp"
#include "retssim/run.hpp"
#include "retssim/version.hpp"

namespace {

using retssim::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::vector<double> taus;
  int realizations = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
  double duration = 0.0;
  double burn_in = -1.0;
  int segment_length = 0;
  int bins_per_decade = 0;
  std::string window;
  bool exclude_zeros = false;
  bool dump_returns = false;
  std::string dump_trajectory;
  std::vector<std::string> inputs;
  std::string session_path;
};

void add_common_options(CLI::App* cmd, CommonFlags& f, bool simulation) {
  cmd->add_option("--config", f.config_path,
                  "JSON config file (a manifest.json from a previous run also works)");
  cmd->add_option("--tau", f.taus, "Window length(s) in seconds (repeatable)");
  cmd->add_option("--out", f.out_dir, "Output directory");
  cmd->add_option("--segment-length", f.segment_length,
                  "Spectrum segment length (power of two)");
  cmd->add_option("--bins-per-decade", f.bins_per_decade,
                  "Histogram bins per decade");
  cmd->add_option("--window", f.window, "Spectrum taper: rectangular or hann");
  cmd->add_flag("--exclude-zeros", f.exclude_zeros,
                "Estimate the normalization dispersion from non-zero windows only");
  if (simulation) {
    cmd->add_option("--realizations", f.realizations, "Independent runs per window length");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--duration", f.duration, "Recorded trajectory span, scaled time units");
    cmd->add_option("--burn-in", f.burn_in, "Discarded lead-in, scaled time units");
    cmd->add_flag("--dump-returns", f.dump_returns,
                  "Also write the normalized return series per window length");
    cmd->add_option("--dump-trajectory", f.dump_trajectory,
                    "Write the first trajectory to this CSV path");
  } else {
    cmd->add_option("--inputs", f.inputs, "Tick CSV file(s) (repeatable)");
    cmd->add_option("--session", f.session_path, "Trading-session JSON file");
  }
}

RunConfig build_config(const CLI::App* cmd, const CommonFlags& f, bool simulation) {
  RunConfig c;
  if (!f.config_path.empty()) {
    c = retssim::load_config_file(f.config_path);
  }
  if (cmd->count("--tau") > 0) {
    c.taus = f.taus;
  }
  if (cmd->count("--out") > 0) {
    c.output_dir = f.out_dir;
  }
  if (cmd->count("--segment-length") > 0) {
    c.analysis.segment_length = f.segment_length;
  }
  if (cmd->count("--bins-per-decade") > 0) {
    c.analysis.bins_per_decade = f.bins_per_decade;
  }
  if (cmd->count("--window") > 0) {
    if (f.window != "rectangular" && f.window != "hann") {
      throw retssim::ConfigError("unknown window '" + f.window +
                                 "' (use rectangular or hann)");
    }
    c.analysis.window = f.window == "hann" ? retssim::WindowKind::kHann
                                           : retssim::WindowKind::kRectangular;
  }
  if (cmd->count("--exclude-zeros") > 0) {
    c.analysis.exclude_zeros_dispersion = true;
  }
  if (simulation) {
    if (cmd->count("--realizations") > 0) {
      c.realizations = f.realizations;
    }
    if (cmd->count("--seed") > 0) {
      c.params.seed = f.seed;
    }
    if (cmd->count("--duration") > 0) {
      c.duration_scaled = f.duration;
    }
    if (cmd->count("--burn-in") > 0) {
      c.params.burn_in_scaled_time = f.burn_in;
    }
    if (cmd->count("--dump-returns") > 0) {
      c.dump_returns = true;
    }
    if (cmd->count("--dump-trajectory") > 0) {
      c.dump_trajectory = f.dump_trajectory;
    }
  } else {
    if (cmd->count("--inputs") > 0) {
      c.inputs.assign(f.inputs.begin(), f.inputs.end());
    }
    if (cmd->count("--session") > 0) {
      c.session = retssim::parse_session_file(f.session_path);
    }
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Return-series simulation and market-statistics toolkit"};
  app.set_version_flag("--version", std::string(retssim::kVersion));
  app.require_subcommand(1);

  CommonFlags sim_flags;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the volatility model and write PDF/PSD statistics");
  add_common_options(sim, sim_flags, true);

  CommonFlags ana_flags;
  CLI::App* ana = app.add_subcommand(
      "analyze", "Compute the same statistics from tick data");
  add_common_options(ana, ana_flags, false);

  std::string cmp_model, cmp_empirical, cmp_report = "compare.csv";
  std::string cmp_config;
  double cmp_threshold = -1.0;
  std::vector<double> cmp_band;
  CLI::App* cmp = app.add_subcommand(
      "compare", "Compare two output directories window-length by window-length");
  cmp->add_option("model_dir", cmp_model, "Simulation output directory")->required();
  cmp->add_option("empirical_dir", cmp_empirical, "Tick-analysis output directory")
      ->required();
  cmp->add_option("--report", cmp_report, "Report CSV path (default compare.csv)");
  cmp->add_option("--config", cmp_config, "JSON config providing comparison options");
  cmp->add_option("--threshold", cmp_threshold, "Maximum allowed metric");
  cmp->add_option("--psd-band", cmp_band, "Spectrum band to compare, Hz: LO HI")
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return retssim::kExitConfig;
  }

  try {
    if (sim->parsed()) {
      retssim::cmd_simulate(build_config(sim, sim_flags, true));
      return 0;
    }
    if (ana->parsed()) {
      retssim::cmd_analyze(build_config(ana, ana_flags, false));
      return 0;
    }
    retssim::AnalysisOptions options;
    if (!cmp_config.empty()) {
      options = retssim::load_config_file(cmp_config).analysis;
    }
    if (cmp->count("--threshold") > 0) {
      options.compare_threshold = cmp_threshold;
    }
    if (cmp->count("--psd-band") > 0) {
      options.psd_band_lo_hz = cmp_band[0];
      options.psd_band_hi_hz = cmp_band[1];
    }
    const retssim::CompareReport report =
        retssim::cmd_compare(cmp_model, cmp_empirical, cmp_report, options);
    for (const auto& row : report.rows) {
      std::printf("tau=%ss pdf_metric=%.6f psd_metric=%.6f\n",
                  retssim::format_double(row.tau_seconds).c_str(), row.pdf_metric,
                  row.psd_metric);
    }
    return 0;
  } catch (const retssim::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return retssim::kExitConfig;
  } catch (const retssim::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return retssim::kExitData;
  } catch (const retssim::ThresholdError& e) {
    std::fprintf(stderr, "threshold exceeded: %s\n", e.what());
    return retssim::kExitThreshold;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return retssim::kExitUnknown;
  }
}
