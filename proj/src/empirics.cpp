#include "retssim/empirics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "json.hpp"
#include "retssim/errors.hpp"

namespace retssim {

namespace {

constexpr std::int64_t kMsPerDay = 86'400'000;

bool parse_i64(std::string_view s, std::int64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_f64(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

// "HH:MM" -> minutes after midnight; 24:00 allowed.
int parse_minutes(const std::string& hhmm) {
  if (hhmm.size() != 5 || hhmm[2] != ':') {
    throw DataError("session time must be HH:MM, got '" + hhmm + "'");
  }
  std::int64_t h = 0, m = 0;
  if (!parse_i64(std::string_view(hhmm).substr(0, 2), h) ||
      !parse_i64(std::string_view(hhmm).substr(3, 2), m) || h < 0 || h > 24 ||
      m < 0 || m > 59 || (h == 24 && m != 0)) {
    throw DataError("invalid session time '" + hhmm + "'");
  }
  return static_cast<int>(h * 60 + m);
}

int parse_utc_offset(const std::string& tz) {
  if (tz == "UTC") {
    return 0;
  }
  // Fixed offsets only: UTC+HH:MM / UTC-HH:MM.
  if (tz.size() == 9 && tz.rfind("UTC", 0) == 0 && (tz[3] == '+' || tz[3] == '-') &&
      tz[6] == ':') {
    std::int64_t h = 0, m = 0;
    if (parse_i64(std::string_view(tz).substr(4, 2), h) &&
        parse_i64(std::string_view(tz).substr(7, 2), m) && h <= 14 && m <= 59) {
      const int mins = static_cast<int>(h * 60 + m);
      return tz[3] == '+' ? mins : -mins;
    }
  }
  throw DataError("unsupported timezone '" + tz + "' (use UTC or UTC+HH:MM)");
}

std::int64_t parse_civil_date(const std::string& ymd) {
  if (ymd.size() != 10 || ymd[4] != '-' || ymd[7] != '-') {
    throw DataError("holiday dates must be YYYY-MM-DD, got '" + ymd + "'");
  }
  std::int64_t y = 0, m = 0, d = 0;
  if (!parse_i64(std::string_view(ymd).substr(0, 4), y) ||
      !parse_i64(std::string_view(ymd).substr(5, 2), m) ||
      !parse_i64(std::string_view(ymd).substr(8, 2), d) || m < 1 || m > 12 ||
      d < 1 || d > 31) {
    throw DataError("invalid date '" + ymd + "'");
  }
  return days_from_civil(static_cast<int>(y), static_cast<unsigned>(m),
                         static_cast<unsigned>(d));
}

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) -
         719468;
}

int weekday_from_days(std::int64_t days) {
  return static_cast<int>(((days % 7) + 11) % 7);
}

TickData parse_ticks(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("tick stream is empty or unreadable");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "timestamp_ms,symbol,price") {
    throw DataError("tick CSV header mismatch, expected timestamp_ms,symbol,price");
  }
  TickData data;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    ++data.rows_total;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    bool ok = c2 != std::string::npos && line.find(',', c2 + 1) == std::string::npos;
    TradeRecord rec;
    std::string symbol;
    if (ok) {
      symbol = line.substr(c1 + 1, c2 - c1 - 1);
      ok = !symbol.empty() &&
           parse_i64(std::string_view(line).substr(0, c1), rec.timestamp_ms) &&
           parse_f64(std::string_view(line).substr(c2 + 1), rec.price) &&
           rec.price > 0.0;
    }
    if (ok) {
      data.by_symbol[symbol].push_back(rec);
    } else {
      ++data.rows_malformed;
    }
  }
  if (data.rows_malformed * 1000 > data.rows_total) {
    throw DataError("malformed tick rows exceed 0.1% budget (" +
                    std::to_string(data.rows_malformed) + " of " +
                    std::to_string(data.rows_total) + ")");
  }
  for (auto& [symbol, records] : data.by_symbol) {
    std::stable_sort(records.begin(), records.end(),
                     [](const TradeRecord& a, const TradeRecord& b) {
                       return a.timestamp_ms < b.timestamp_ms;
                     });
  }
  return data;
}

TickData parse_ticks_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open tick file " + path.string());
  }
  return parse_ticks(in);
}

SessionSpec parse_session(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid session JSON: ") + e.what());
  }
  SessionSpec spec;
  try {
    spec.exchange = j.value("exchange", std::string("UNKNOWN"));
    spec.utc_offset_minutes = parse_utc_offset(j.value("timezone", std::string("UTC")));
    spec.open_minutes = parse_minutes(j.value("open", std::string("00:00")));
    spec.close_minutes = parse_minutes(j.value("close", std::string("24:00")));
    if (j.contains("holidays")) {
      for (const auto& h : j.at("holidays")) {
        spec.holidays.insert(parse_civil_date(h.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid session JSON: ") + e.what());
  }
  if (spec.close_minutes <= spec.open_minutes) {
    throw DataError("session close must be after open");
  }
  return spec;
}

SessionSpec parse_session_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open session file " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_session(text);
}

PriceGrid build_grid(const std::vector<TradeRecord>& records, double tau_seconds,
                     const SessionSpec& session) {
  if (records.empty()) {
    throw DataError("no trade records");
  }
  const auto tau_ms = static_cast<std::int64_t>(std::llround(tau_seconds * 1000.0));
  if (tau_ms <= 0 || std::abs(tau_seconds * 1000.0 - static_cast<double>(tau_ms)) > 1e-6) {
    throw ConfigError("tau must be a positive whole number of milliseconds");
  }
  const std::int64_t offset_ms =
      static_cast<std::int64_t>(session.utc_offset_minutes) * 60'000;

  PriceGrid grid;
  grid.tau_seconds = tau_seconds;
  const std::int64_t first_day = floor_div(records.front().timestamp_ms + offset_ms, kMsPerDay);
  const std::int64_t last_day = floor_div(records.back().timestamp_ms + offset_ms, kMsPerDay);
  for (std::int64_t day = first_day; day <= last_day; ++day) {
    const int wd = weekday_from_days(day);
    if (wd == 0 || wd == 6 || session.holidays.count(day) != 0) {
      continue;
    }
    const std::int64_t sess_start =
        day * kMsPerDay - offset_ms + static_cast<std::int64_t>(session.open_minutes) * 60'000;
    const std::int64_t sess_end =
        day * kMsPerDay - offset_ms + static_cast<std::int64_t>(session.close_minutes) * 60'000;
    auto it = std::lower_bound(records.begin(), records.end(), sess_start,
                               [](const TradeRecord& r, std::int64_t t) {
                                 return r.timestamp_ms < t;
                               });
    GridSegment segment;
    bool have_price = false;
    double last_price = 0.0;
    for (std::int64_t b = sess_start; b <= sess_end; b += tau_ms) {
      while (it != records.end() && it->timestamp_ms <= b) {
        last_price = it->price;
        have_price = true;
        ++it;
      }
      if (!have_price) {
        continue;  // boundary before the first in-session trade: absent
      }
      if (segment.prices.empty()) {
        segment.start_ms = b;
      }
      segment.prices.push_back(last_price);
    }
    if (!segment.prices.empty()) {
      grid.segments.push_back(std::move(segment));
    }
  }
  return grid;
}

ReturnSeries compute_returns(const PriceGrid& grid) {
  ReturnSeries series;
  series.tau_seconds = grid.tau_seconds;
  bool first = true;
  for (const auto& segment : grid.segments) {
    for (std::size_t i = 1; i < segment.prices.size(); ++i) {
      if (first) {
        series.start_time_seconds = static_cast<double>(segment.start_ms) / 1000.0;
        first = false;
      }
      const double prev = segment.prices[i - 1];
      const double cur = segment.prices[i];
      series.values.push_back(std::log(cur) - std::log(prev));
      series.zero_flags.push_back(cur == prev ? 1 : 0);
    }
  }
  if (series.values.empty()) {
    throw DataError("grid has no pair of consecutive prices to form a return");
  }
  return series;
}

ExcludeResult exclude_zeros(const ReturnSeries& series) {
  ExcludeResult result;
  result.series.tau_seconds = series.tau_seconds;
  result.series.start_time_seconds = series.start_time_seconds;
  result.series.normalized = series.normalized;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (series.zero_flag(i)) {
      ++excluded;
    } else {
      result.series.values.push_back(series.values[i]);
    }
  }
  if (result.series.values.empty()) {
    throw DataError("every window is zero-flagged; nothing left after exclusion");
  }
  result.excluded_fraction = series.values.empty()
                                 ? 0.0
                                 : static_cast<double>(excluded) /
                                       static_cast<double>(series.values.size());
  return result;
}

}  // namespace retssim
