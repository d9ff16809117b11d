#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "retssim/empirics.hpp"
#include "retssim/sde.hpp"
#include "retssim/stats.hpp"

namespace retssim {

struct AnalysisOptions {
  int bins_per_decade = 10;
  int segment_length = 16384;
  WindowKind window = WindowKind::kRectangular;
  // Estimate the normalization dispersion from non-zero windows only
  // (sparse-market convention); PDF estimation always drops zero windows in
  // the empirical pipeline, spectra always keep the full sequence.
  bool exclude_zeros_dispersion = false;
  double compare_threshold = 0.3;
  double psd_band_lo_hz = 0.0;  // 0 = full shared axis
  double psd_band_hi_hz = 0.0;  // 0 = full shared axis
};

struct RunConfig {
  ModelParams params;
  std::vector<double> taus = {60.0, 600.0, 1800.0};
  int realizations = 1;
  double duration_scaled = 20.0;
  std::filesystem::path output_dir = "out";
  std::vector<std::filesystem::path> inputs;
  std::optional<SessionSpec> session;
  AnalysisOptions analysis;
  bool dump_returns = false;
  std::optional<std::filesystem::path> dump_trajectory;
};

// Reads a JSON config. A manifest written by a previous run is also accepted:
// its embedded "config" object is loaded, which reproduces that run.
RunConfig load_config_file(const std::filesystem::path& path);
RunConfig load_config_text(const std::string& json_text);
std::string config_to_json_text(const RunConfig& config);

// Parallelism cap: RETSSIM_THREADS if set (>=1), else hardware concurrency.
int thread_cap();

// Directory name for one window length, e.g. 60 -> "60s".
std::string tau_dir_name(double tau_seconds);

// Simulation pipeline: per tau, `realizations` seeded runs ->
// returns -> normalization -> ensemble PDF + PSD, written under
// <output_dir>/<tau>s/ with a manifest.json. Partial outputs are removed on
// failure.
void cmd_simulate(const RunConfig& config);

// Empirical pipeline: tick CSVs -> per-symbol per-tau grid -> log returns ->
// normalization -> PDF (zero windows excluded) and PSD (full sequence),
// averaged across symbols. Same output layout and manifest.
void cmd_analyze(const RunConfig& config);

struct CompareRow {
  double tau_seconds = 0.0;
  double pdf_metric = 0.0;
  double psd_metric = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double threshold = 0.0;
  bool passed = false;
};

// Reads matching <tau>s/{pdf.csv,psd.csv} pairs from both directories, writes
// a per-tau metric report CSV (`tau_s,pdf_metric,psd_metric`), and throws
// ThresholdError after writing when any metric exceeds the threshold.
CompareReport cmd_compare(const std::filesystem::path& model_dir,
                          const std::filesystem::path& empirical_dir,
                          const std::filesystem::path& report_path,
                          const AnalysisOptions& options);

}  // namespace retssim
