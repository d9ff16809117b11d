#include "retssim/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "retssim/csv_io.hpp"
#include "retssim/errors.hpp"
#include "retssim/rng.hpp"
#include "retssim/synth.hpp"
#include "retssim/version.hpp"

namespace retssim {

namespace {

using json = nlohmann::ordered_json;

// Inverse of days_from_civil (Howard Hinnant's algorithm).
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<std::uint64_t>(z - era * 146097);
  const std::uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const auto yr = static_cast<std::int64_t>(yoe) + era * 400;
  const std::uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::uint64_t mp = (5 * doy + 2) / 153;
  d = static_cast<unsigned>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<unsigned>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yr + (m <= 2));
}

std::string two_digits(int v) {
  std::string s = std::to_string(v);
  return v < 10 ? "0" + s : s;
}

std::string iso_date(std::int64_t days) {
  int y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  return std::to_string(y) + "-" + two_digits(static_cast<int>(m)) + "-" +
         two_digits(static_cast<int>(d));
}

std::string minutes_to_hhmm(int minutes) {
  return two_digits(minutes / 60) + ":" + two_digits(minutes % 60);
}

std::string offset_to_timezone(int offset_minutes) {
  if (offset_minutes == 0) {
    return "UTC";
  }
  const char sign = offset_minutes < 0 ? '-' : '+';
  const int mag = std::abs(offset_minutes);
  return std::string("UTC") + sign + minutes_to_hhmm(mag);
}

json session_to_json(const SessionSpec& s) {
  json j;
  j["exchange"] = s.exchange;
  j["timezone"] = offset_to_timezone(s.utc_offset_minutes);
  j["open"] = minutes_to_hhmm(s.open_minutes);
  j["close"] = minutes_to_hhmm(s.close_minutes);
  json hol = json::array();
  for (const auto day : s.holidays) {
    hol.push_back(iso_date(day));
  }
  j["holidays"] = std::move(hol);
  return j;
}

WindowKind window_from_name(const std::string& name) {
  if (name == "rectangular") {
    return WindowKind::kRectangular;
  }
  if (name == "hann") {
    return WindowKind::kHann;
  }
  throw ConfigError("unknown window '" + name + "' (use rectangular or hann)");
}

std::string window_name(WindowKind w) {
  return w == WindowKind::kHann ? "hann" : "rectangular";
}

json config_to_json(const RunConfig& c) {
  json p;
  p["eta"] = c.params.eta;
  p["lambda0"] = c.params.lambda0;
  p["epsilon"] = c.params.epsilon;
  p["x_max"] = c.params.x_max;
  p["sigma_t_sq"] = c.params.sigma_t_sq;
  p["r0_bar"] = c.params.r0_bar;
  p["lambda"] = c.params.lambda;
  p["kappa"] = c.params.kappa;
  p["seed"] = c.params.seed;
  p["burn_in_scaled_time"] = c.params.burn_in_scaled_time;
  p["x0"] = c.params.x0;
  p["degenerate_x"] = c.params.degenerate_x;
  p["literal_update"] = c.params.literal_update;
  p["clamp_fail_fraction"] = c.params.clamp_fail_fraction;

  json a;
  a["bins_per_decade"] = c.analysis.bins_per_decade;
  a["segment_length"] = c.analysis.segment_length;
  a["window"] = window_name(c.analysis.window);
  a["exclude_zeros_dispersion"] = c.analysis.exclude_zeros_dispersion;
  a["compare_threshold"] = c.analysis.compare_threshold;
  a["psd_band_lo_hz"] = c.analysis.psd_band_lo_hz;
  a["psd_band_hi_hz"] = c.analysis.psd_band_hi_hz;

  json j;
  j["params"] = std::move(p);
  j["taus"] = c.taus;
  j["realizations"] = c.realizations;
  j["duration_scaled"] = c.duration_scaled;
  j["output_dir"] = c.output_dir.string();
  json inputs = json::array();
  for (const auto& path : c.inputs) {
    inputs.push_back(path.string());
  }
  j["inputs"] = std::move(inputs);
  if (c.session.has_value()) {
    j["session"] = session_to_json(*c.session);
  }
  j["analysis"] = std::move(a);
  j["dump_returns"] = c.dump_returns;
  if (c.dump_trajectory.has_value()) {
    j["dump_trajectory"] = c.dump_trajectory->string();
  }
  return j;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad config field '") + key + "': " + e.what());
    }
  }
}

RunConfig config_from_json(const json& root) {
  if (!root.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  RunConfig c;
  if (root.contains("params")) {
    const json& p = root.at("params");
    if (!p.is_object()) {
      throw ConfigError("'params' must be an object");
    }
    read_if(p, "eta", c.params.eta);
    read_if(p, "lambda0", c.params.lambda0);
    read_if(p, "epsilon", c.params.epsilon);
    read_if(p, "x_max", c.params.x_max);
    read_if(p, "sigma_t_sq", c.params.sigma_t_sq);
    read_if(p, "r0_bar", c.params.r0_bar);
    read_if(p, "lambda", c.params.lambda);
    read_if(p, "kappa", c.params.kappa);
    read_if(p, "seed", c.params.seed);
    read_if(p, "burn_in_scaled_time", c.params.burn_in_scaled_time);
    read_if(p, "x0", c.params.x0);
    read_if(p, "degenerate_x", c.params.degenerate_x);
    read_if(p, "literal_update", c.params.literal_update);
    read_if(p, "clamp_fail_fraction", c.params.clamp_fail_fraction);
  }
  read_if(root, "taus", c.taus);
  read_if(root, "realizations", c.realizations);
  read_if(root, "duration_scaled", c.duration_scaled);
  std::string out_dir = c.output_dir.string();
  read_if(root, "output_dir", out_dir);
  c.output_dir = out_dir;
  if (root.contains("inputs")) {
    std::vector<std::string> inputs;
    read_if(root, "inputs", inputs);
    c.inputs.assign(inputs.begin(), inputs.end());
  }
  if (root.contains("session")) {
    c.session = parse_session(root.at("session").dump());
  }
  if (root.contains("analysis")) {
    const json& a = root.at("analysis");
    if (!a.is_object()) {
      throw ConfigError("'analysis' must be an object");
    }
    read_if(a, "bins_per_decade", c.analysis.bins_per_decade);
    read_if(a, "segment_length", c.analysis.segment_length);
    if (a.contains("window")) {
      c.analysis.window = window_from_name(a.at("window").get<std::string>());
    }
    read_if(a, "exclude_zeros_dispersion", c.analysis.exclude_zeros_dispersion);
    read_if(a, "compare_threshold", c.analysis.compare_threshold);
    read_if(a, "psd_band_lo_hz", c.analysis.psd_band_lo_hz);
    read_if(a, "psd_band_hi_hz", c.analysis.psd_band_hi_hz);
  }
  read_if(root, "dump_returns", c.dump_returns);
  if (root.contains("dump_trajectory")) {
    c.dump_trajectory = root.at("dump_trajectory").get<std::string>();
  }
  return c;
}

void validate_common(const RunConfig& c) {
  validate(c.params);
  if (c.taus.empty()) {
    throw ConfigError("at least one window length is required");
  }
  for (const double tau : c.taus) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw ConfigError("window lengths must be positive and finite");
    }
  }
  if (c.realizations < 1) {
    throw ConfigError("realizations must be >= 1");
  }
  if (!(c.duration_scaled > 0.0) || !std::isfinite(c.duration_scaled)) {
    throw ConfigError("duration_scaled must be positive and finite");
  }
  if (c.analysis.bins_per_decade < 4) {
    throw ConfigError("bins_per_decade must be at least 4");
  }
}

// Runs tasks 0..n-1 on at most thread_cap() workers. Results must be written
// into pre-sized slots so the outcome is independent of scheduling. The
// lowest-index exception wins and is rethrown.
void run_indexed_tasks(std::size_t n, const std::function<void(std::size_t)>& task) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      task(i);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) {
        return;
      }
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

// Removes files written so far if the write phase throws midway.
class PartialOutputGuard {
 public:
  void add(const std::filesystem::path& p) { written_.push_back(p); }
  void dismiss() { written_.clear(); }
  ~PartialOutputGuard() {
    for (const auto& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

 private:
  std::vector<std::filesystem::path> written_;
};

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const RunConfig& config, json results,
                    PartialOutputGuard& guard) {
  json manifest;
  manifest["tool"] = "retssim";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["config"] = config_to_json(config);
  manifest["results"] = std::move(results);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw DataError("cannot open for writing: " + path.string());
  }
  guard.add(path);
  f << manifest.dump(2) << '\n';
  if (!f) {
    throw DataError("write failed: " + path.string());
  }
}

}  // namespace

RunConfig load_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  // A manifest from a previous run can be replayed directly.
  if (root.is_object() && root.contains("config") && root.at("config").is_object()) {
    return config_from_json(root.at("config"));
  }
  return config_from_json(root);
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_config_text(ss.str());
}

std::string config_to_json_text(const RunConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

int thread_cap() {
  if (const char* env = std::getenv("RETSSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096) {
      throw ConfigError("RETSSIM_THREADS must be an integer in [1, 4096]");
    }
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string tau_dir_name(double tau_seconds) {
  const double rounded = std::round(tau_seconds);
  if (std::abs(tau_seconds - rounded) < 1e-9 && rounded >= 1.0) {
    return std::to_string(static_cast<std::int64_t>(rounded)) + "s";
  }
  return format_double(tau_seconds) + "s";
}

void cmd_simulate(const RunConfig& config) {
  validate_common(config);

  struct TaskResult {
    ReturnSeries series;       // normalized
    double dispersion = 0.0;
    std::uint64_t clamp_count = 0;
    std::uint64_t steps_total = 0;
  };
  const std::size_t n_taus = config.taus.size();
  const auto n_real = static_cast<std::size_t>(config.realizations);
  std::vector<TaskResult> results(n_taus * n_real);

  std::optional<Trajectory> dump_traj;
  std::mutex dump_mutex;

  run_indexed_tasks(results.size(), [&](std::size_t k) {
    const std::size_t ti = k / n_real;
    ModelParams p = config.params;
    Engine traj_engine = make_engine(config.params.seed, 2 * k);
    Engine draw_engine = make_engine(config.params.seed, 2 * k + 1);
    Trajectory traj = simulate(p, config.duration_scaled, traj_engine);
    ReturnSeries raw =
        generate_returns(traj, p, config.taus[ti], draw_engine);
    NormalizeResult norm = config.analysis.exclude_zeros_dispersion
                               ? normalize_excluding_zeros(raw)
                               : normalize(raw);
    TaskResult& out = results[k];
    out.series = std::move(norm.series);
    out.dispersion = norm.dispersion;
    out.clamp_count = traj.clamp_count;
    out.steps_total = traj.steps_total;
    if (config.dump_trajectory.has_value() && k == 0) {
      std::lock_guard<std::mutex> lock(dump_mutex);
      dump_traj = std::move(traj);
    }
  });

  std::filesystem::create_directories(config.output_dir);
  PartialOutputGuard guard;
  json tau_reports = json::array();

  for (std::size_t ti = 0; ti < n_taus; ++ti) {
    const double tau = config.taus[ti];
    double max_abs = 0.0;
    for (std::size_t ri = 0; ri < n_real; ++ri) {
      for (const double v : results[ti * n_real + ri].series.values) {
        max_abs = std::max(max_abs, std::abs(v));
      }
    }
    const std::vector<double> edges =
        log_bin_edges(max_abs, config.analysis.bins_per_decade);

    std::vector<HistogramEstimate> hists;
    std::vector<SpectrumEstimate> specs;
    hists.reserve(n_real);
    specs.reserve(n_real);
    for (std::size_t ri = 0; ri < n_real; ++ri) {
      const ReturnSeries& s = results[ti * n_real + ri].series;
      hists.push_back(pdf_estimate_on(s, edges, false));
      specs.push_back(psd_estimate(s, config.analysis.segment_length, tau,
                                   config.analysis.window));
    }
    const HistogramEstimate pdf = ensemble_merge(hists);
    const SpectrumEstimate psd = ensemble_merge(specs);

    const std::filesystem::path tau_dir = config.output_dir / tau_dir_name(tau);
    std::filesystem::create_directories(tau_dir);
    guard.add(tau_dir / "pdf.csv");
    write_histogram_csv(tau_dir / "pdf.csv", pdf);
    guard.add(tau_dir / "psd.csv");
    write_spectrum_csv(tau_dir / "psd.csv", psd);

    json report;
    report["tau_s"] = tau;
    report["dir"] = tau_dir_name(tau);
    json windows = json::array();
    json clamps = json::array();
    json steps = json::array();
    json disps = json::array();
    json outputs = json::array();
    outputs.push_back(tau_dir_name(tau) + "/pdf.csv");
    outputs.push_back(tau_dir_name(tau) + "/psd.csv");
    for (std::size_t ri = 0; ri < n_real; ++ri) {
      const TaskResult& r = results[ti * n_real + ri];
      windows.push_back(r.series.size());
      clamps.push_back(r.clamp_count);
      steps.push_back(r.steps_total);
      disps.push_back(r.dispersion);
    }
    if (config.dump_returns) {
      for (std::size_t ri = 0; ri < n_real; ++ri) {
        const std::string name =
            n_real == 1 ? "returns.csv"
                        : "returns_" + std::to_string(ri) + ".csv";
        guard.add(tau_dir / name);
        write_returns_csv(tau_dir / name, results[ti * n_real + ri].series);
        outputs.push_back(tau_dir_name(tau) + "/" + name);
      }
    }
    report["windows"] = std::move(windows);
    report["clamp_counts"] = std::move(clamps);
    report["steps_total"] = std::move(steps);
    report["dispersions"] = std::move(disps);
    report["outputs"] = std::move(outputs);
    tau_reports.push_back(std::move(report));
  }

  if (config.dump_trajectory.has_value()) {
    if (dump_traj.has_value()) {
      guard.add(*config.dump_trajectory);
      write_trajectory_csv(*config.dump_trajectory, *dump_traj);
    }
  }

  json res;
  res["taus"] = std::move(tau_reports);
  write_manifest(config.output_dir / "manifest.json", "simulate", config,
                 std::move(res), guard);
  guard.dismiss();
}

void cmd_analyze(const RunConfig& config) {
  validate_common(config);
  if (config.inputs.empty()) {
    throw ConfigError("analyze requires at least one input tick file");
  }

  json input_digests = json::array();
  std::map<std::string, std::vector<TradeRecord>> by_symbol;
  for (const auto& path : config.inputs) {
    json entry;
    entry["path"] = path.string();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(path)));
    entry["fnv1a64"] = hex;
    input_digests.push_back(std::move(entry));

    TickData ticks = parse_ticks_file(path);
    for (auto& [symbol, records] : ticks.by_symbol) {
      auto& dest = by_symbol[symbol];
      dest.insert(dest.end(), records.begin(), records.end());
    }
  }
  for (auto& [symbol, records] : by_symbol) {
    std::stable_sort(records.begin(), records.end(),
                     [](const TradeRecord& a, const TradeRecord& b) {
                       return a.timestamp_ms < b.timestamp_ms;
                     });
  }
  const SessionSpec session = config.session.value_or(SessionSpec{});

  std::vector<std::string> symbols;
  symbols.reserve(by_symbol.size());
  for (const auto& [symbol, records] : by_symbol) {
    symbols.push_back(symbol);  // std::map iterates in sorted order
  }

  struct TaskResult {
    ReturnSeries normalized;   // full sequence, zero flags kept
    ReturnSeries nonzero;      // zero windows dropped, for the PDF
    double dispersion = 0.0;
    double excluded_fraction = 0.0;
  };
  const std::size_t n_taus = config.taus.size();
  const std::size_t n_symbols = symbols.size();
  std::vector<TaskResult> results(n_taus * n_symbols);

  run_indexed_tasks(results.size(), [&](std::size_t k) {
    const std::size_t ti = k / n_symbols;
    const std::size_t si = k % n_symbols;
    const auto& records = by_symbol.at(symbols[si]);
    PriceGrid grid = build_grid(records, config.taus[ti], session);
    ReturnSeries returns = compute_returns(grid);
    NormalizeResult norm = config.analysis.exclude_zeros_dispersion
                               ? normalize_excluding_zeros(returns)
                               : normalize(returns);
    ExcludeResult kept = exclude_zeros(norm.series);
    TaskResult& out = results[k];
    out.normalized = std::move(norm.series);
    out.nonzero = std::move(kept.series);
    out.dispersion = norm.dispersion;
    out.excluded_fraction = kept.excluded_fraction;
  });

  std::filesystem::create_directories(config.output_dir);
  PartialOutputGuard guard;
  json tau_reports = json::array();

  for (std::size_t ti = 0; ti < n_taus; ++ti) {
    const double tau = config.taus[ti];
    double max_abs = 0.0;
    for (std::size_t si = 0; si < n_symbols; ++si) {
      for (const double v : results[ti * n_symbols + si].nonzero.values) {
        max_abs = std::max(max_abs, std::abs(v));
      }
    }
    if (!(max_abs > 0.0)) {
      throw DataError("all returns are zero after exclusion for " +
                      tau_dir_name(tau));
    }
    const std::vector<double> edges =
        log_bin_edges(max_abs, config.analysis.bins_per_decade);

    std::vector<HistogramEstimate> hists;
    std::vector<SpectrumEstimate> specs;
    for (std::size_t si = 0; si < n_symbols; ++si) {
      const TaskResult& r = results[ti * n_symbols + si];
      hists.push_back(pdf_estimate_on(r.nonzero, edges, false));
      specs.push_back(psd_estimate(r.normalized, config.analysis.segment_length,
                                   tau, config.analysis.window));
    }
    const HistogramEstimate pdf = ensemble_merge(hists);
    const SpectrumEstimate psd = ensemble_merge(specs);

    const std::filesystem::path tau_dir = config.output_dir / tau_dir_name(tau);
    std::filesystem::create_directories(tau_dir);
    guard.add(tau_dir / "pdf.csv");
    write_histogram_csv(tau_dir / "pdf.csv", pdf);
    guard.add(tau_dir / "psd.csv");
    write_spectrum_csv(tau_dir / "psd.csv", psd);

    json report;
    report["tau_s"] = tau;
    report["dir"] = tau_dir_name(tau);
    json syms = json::array();
    for (std::size_t si = 0; si < n_symbols; ++si) {
      const TaskResult& r = results[ti * n_symbols + si];
      json s;
      s["symbol"] = symbols[si];
      s["windows"] = r.normalized.size();
      s["excluded_zero_fraction"] = r.excluded_fraction;
      s["dispersion"] = r.dispersion;
      syms.push_back(std::move(s));
    }
    report["symbols"] = std::move(syms);
    json outputs = json::array();
    outputs.push_back(tau_dir_name(tau) + "/pdf.csv");
    outputs.push_back(tau_dir_name(tau) + "/psd.csv");
    report["outputs"] = std::move(outputs);
    tau_reports.push_back(std::move(report));
  }

  json res;
  res["inputs"] = std::move(input_digests);
  res["symbols"] = symbols;
  res["session"] = session_to_json(session);
  res["taus"] = std::move(tau_reports);
  write_manifest(config.output_dir / "manifest.json", "analyze", config,
                 std::move(res), guard);
  guard.dismiss();
}

namespace {

std::vector<std::string> tau_dirs_with_outputs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("not a directory: " + dir.string());
  }
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_directory()) {
      continue;
    }
    const std::string name = entry.path().filename().string();
    if (name.size() < 2 || name.back() != 's') {
      continue;
    }
    const std::string digits = name.substr(0, name.size() - 1);
    try {
      if (parse_double(digits) <= 0.0) {
        continue;
      }
    } catch (const DataError&) {
      continue;
    }
    if (std::filesystem::exists(entry.path() / "pdf.csv") &&
        std::filesystem::exists(entry.path() / "psd.csv")) {
      names.push_back(name);
    }
  }
  std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
    return parse_double(a.substr(0, a.size() - 1)) <
           parse_double(b.substr(0, b.size() - 1));
  });
  return names;
}

}  // namespace

CompareReport cmd_compare(const std::filesystem::path& model_dir,
                          const std::filesystem::path& empirical_dir,
                          const std::filesystem::path& report_path,
                          const AnalysisOptions& options) {
  const auto model_taus = tau_dirs_with_outputs(model_dir);
  const auto emp_taus = tau_dirs_with_outputs(empirical_dir);
  std::vector<std::string> common;
  for (const auto& name : model_taus) {
    if (std::find(emp_taus.begin(), emp_taus.end(), name) != emp_taus.end()) {
      common.push_back(name);
    }
  }
  if (common.empty()) {
    throw DataError("no matching per-window output directories to compare");
  }

  CompareReport report;
  report.threshold = options.compare_threshold;
  std::string csv = "tau_s,pdf_metric,psd_metric\n";
  for (const auto& name : common) {
    const double tau = parse_double(name.substr(0, name.size() - 1));
    const HistogramEstimate pdf_m = read_histogram_csv(model_dir / name / "pdf.csv");
    const HistogramEstimate pdf_e =
        read_histogram_csv(empirical_dir / name / "pdf.csv");
    const SpectrumEstimate psd_m = read_spectrum_csv(model_dir / name / "psd.csv");
    const SpectrumEstimate psd_e =
        read_spectrum_csv(empirical_dir / name / "psd.csv");

    CompareRow row;
    row.tau_seconds = tau;
    row.pdf_metric = pdf_compare_metric(pdf_m, pdf_e, 100);
    double f_lo = options.psd_band_lo_hz;
    double f_hi = options.psd_band_hi_hz;
    if (f_hi <= 0.0) {
      f_lo = 0.0;
      f_hi = std::numeric_limits<double>::infinity();
    }
    row.psd_metric = psd_compare_metric(psd_m, psd_e, f_lo, f_hi);
    report.rows.push_back(row);

    csv += format_double(tau);
    csv += ',';
    csv += format_double(row.pdf_metric);
    csv += ',';
    csv += format_double(row.psd_metric);
    csv += '\n';
  }

  {
    std::ofstream f(report_path, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw DataError("cannot open for writing: " + report_path.string());
    }
    f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    if (!f) {
      throw DataError("write failed: " + report_path.string());
    }
  }

  report.passed = true;
  for (const auto& row : report.rows) {
    if (row.pdf_metric > options.compare_threshold ||
        row.psd_metric > options.compare_threshold) {
      report.passed = false;
    }
  }
  if (!report.passed) {
    throw ThresholdError("comparison metric exceeds threshold " +
                         format_double(options.compare_threshold) + " (report: " +
                         report_path.string() + ")");
  }
  return report;
}

}  // namespace retssim
