#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "retssim/series.hpp"

namespace retssim {

struct TradeRecord {
  std::int64_t timestamp_ms = 0;
  double price = 0.0;
};

struct TickData {
  // Per-symbol records, time-sorted (stable: ties keep file order).
  std::map<std::string, std::vector<TradeRecord>> by_symbol;
  std::uint64_t rows_total = 0;
  std::uint64_t rows_malformed = 0;
};

// Parses `timestamp_ms,symbol,price` CSV (UTF-8, LF or CRLF). Malformed rows
// (bad fields, price <= 0) are counted and dropped; more than 0.1% malformed
// fails with DataError, as do a missing/misnamed header or unreadable stream.
TickData parse_ticks(std::istream& in);
TickData parse_ticks_file(const std::filesystem::path& path);

// Trading-session calendar: Monday..Friday sessions from open to close in the
// exchange-local timezone, minus holidays. Only "UTC" and fixed offsets
// "UTC+HH:MM" / "UTC-HH:MM" are supported.
struct SessionSpec {
  std::string exchange = "SYNTH";
  int utc_offset_minutes = 0;
  int open_minutes = 0;         // minutes after local midnight
  int close_minutes = 24 * 60;  // may be 24:00
  std::set<std::int64_t> holidays;  // local civil days, days since 1970-01-01

  // UTC session bounds [start_ms, end_ms] for the local civil day, or no
  // value if that day has no session (weekend or holiday).
  struct Window {
    std::int64_t start_ms;
    std::int64_t end_ms;
  };
};

SessionSpec parse_session(const std::string& json_text);
SessionSpec parse_session_file(const std::filesystem::path& path);

// Civil-calendar helpers (proleptic Gregorian).
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
int weekday_from_days(std::int64_t days);  // 0 = Sunday .. 6 = Saturday

// Prices sampled at tau-spaced boundaries inside trading sessions,
// previous-tick (hold-last within session): each session starts a fresh
// segment, boundaries before the first in-session trade are absent and the
// stored segment starts at the first boundary with a price.
struct GridSegment {
  std::int64_t start_ms = 0;           // first present boundary
  std::vector<double> prices;          // all present, spacing exactly tau
};

struct PriceGrid {
  double tau_seconds = 0.0;
  std::vector<GridSegment> segments;
};

// Throws DataError on empty records or invalid tau.
PriceGrid build_grid(const std::vector<TradeRecord>& records, double tau_seconds,
                     const SessionSpec& session);

// r = ln p(t+tau) - ln p(t) between consecutive present boundaries within one
// segment; zero_flags set where the price did not change. Session segments
// are concatenated. Throws DataError if no return can be formed.
ReturnSeries compute_returns(const PriceGrid& grid);

struct ExcludeResult {
  ReturnSeries series;
  double excluded_fraction = 0.0;
};

// Subsequence with zero_flags false; for PDF estimation only (spectra always
// use the full sequence). Throws DataError if nothing remains.
ExcludeResult exclude_zeros(const ReturnSeries& series);

}  // namespace retssim
