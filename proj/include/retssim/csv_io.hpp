#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "retssim/sde.hpp"
#include "retssim/series.hpp"

namespace retssim {

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);
double parse_double(const std::string& s);  // DataError on failure

// `t_seconds,r`
void write_returns_csv(const std::filesystem::path& path, const ReturnSeries& s);
ReturnSeries read_returns_csv(const std::filesystem::path& path);

// `bin_lo,bin_hi,density,count`
void write_histogram_csv(const std::filesystem::path& path, const HistogramEstimate& h);
HistogramEstimate read_histogram_csv(const std::filesystem::path& path);

// `freq_hz,power`
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumEstimate& s);
SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path);

// `timestamp_ms,symbol,price`
void write_ticks_csv(const std::filesystem::path& path, const std::string& symbol,
                     std::span<const std::int64_t> timestamps_ms,
                     std::span<const double> prices);

// `t_scaled,x` debugging dump; refuses more than max_rows rows (ConfigError).
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::uint64_t max_rows = 5'000'000);

// FNV-1a 64-bit digest of a file's bytes, for input fingerprints in manifests.
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::uint64_t fnv1a64_bytes(std::span<const char> bytes);

}  // namespace retssim
