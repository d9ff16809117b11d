#include "retssim/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "retssim/errors.hpp"

namespace retssim {

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw DataError("cannot open for writing: " + path.string());
  }
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) {
    throw DataError("write failed: " + path.string());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw DataError("cannot open for reading: " + path.string());
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Splits on '\n', trimming a trailing '\r'; skips empty lines.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      nl = text.size();
    }
    std::size_t end = nl;
    if (end > pos && text[end - 1] == '\r') {
      --end;
    }
    if (end > pos) {
      lines.emplace_back(text.substr(pos, end - pos));
    }
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

void expect_header(const std::vector<std::string>& lines, const std::string& header,
                   const std::filesystem::path& path) {
  if (lines.empty() || lines.front() != header) {
    throw DataError("expected header '" + header + "' in " + path.string());
  }
}

std::uint64_t parse_u64_field(const std::string& s, std::uint64_t line_no,
                              const std::filesystem::path& path) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("bad integer at line " + std::to_string(line_no) + " of " +
                    path.string());
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::string out;
  append_double(out, v);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("cannot parse number: '" + s + "'");
  }
  return v;
}

void write_returns_csv(const std::filesystem::path& path, const ReturnSeries& s) {
  std::string out = "t_seconds,r\n";
  out.reserve(out.size() + s.values.size() * 24);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    append_double(out, s.start_time_seconds +
                           static_cast<double>(i) * s.tau_seconds);
    out.push_back(',');
    append_double(out, s.values[i]);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

ReturnSeries read_returns_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  expect_header(lines, "t_seconds,r", path);
  ReturnSeries s;
  std::vector<double> times;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 2) {
      throw DataError("expected 2 fields at line " + std::to_string(i + 1) +
                      " of " + path.string());
    }
    times.push_back(parse_double(fields[0]));
    s.values.push_back(parse_double(fields[1]));
  }
  if (s.values.empty()) {
    throw DataError("no return rows in " + path.string());
  }
  s.start_time_seconds = times.front();
  s.tau_seconds = times.size() > 1 ? times[1] - times[0] : 0.0;
  return s;
}

void write_histogram_csv(const std::filesystem::path& path,
                         const HistogramEstimate& h) {
  std::string out = "bin_lo,bin_hi,density,count\n";
  for (std::size_t b = 0; b < h.bins(); ++b) {
    append_double(out, h.bin_edges[b]);
    out.push_back(',');
    append_double(out, h.bin_edges[b + 1]);
    out.push_back(',');
    append_double(out, h.density[b]);
    out.push_back(',');
    out += std::to_string(h.counts[b]);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

HistogramEstimate read_histogram_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  expect_header(lines, "bin_lo,bin_hi,density,count", path);
  HistogramEstimate h;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 4) {
      throw DataError("expected 4 fields at line " + std::to_string(i + 1) +
                      " of " + path.string());
    }
    const double lo = parse_double(fields[0]);
    const double hi = parse_double(fields[1]);
    if (h.bin_edges.empty()) {
      h.bin_edges.push_back(lo);
    } else if (h.bin_edges.back() != lo) {
      throw DataError("non-contiguous bins in " + path.string());
    }
    h.bin_edges.push_back(hi);
    h.density.push_back(parse_double(fields[2]));
    h.counts.push_back(parse_u64_field(fields[3], i + 1, path));
    h.total_count += h.counts.back();
  }
  if (h.density.empty()) {
    throw DataError("no histogram rows in " + path.string());
  }
  return h;
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const SpectrumEstimate& s) {
  std::string out = "freq_hz,power\n";
  out.reserve(out.size() + s.power.size() * 24);
  for (std::size_t k = 0; k < s.power.size(); ++k) {
    append_double(out, s.freq_hz[k]);
    out.push_back(',');
    append_double(out, s.power[k]);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  expect_header(lines, "freq_hz,power", path);
  SpectrumEstimate s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 2) {
      throw DataError("expected 2 fields at line " + std::to_string(i + 1) +
                      " of " + path.string());
    }
    s.freq_hz.push_back(parse_double(fields[0]));
    s.power.push_back(parse_double(fields[1]));
  }
  if (s.power.empty()) {
    throw DataError("no spectrum rows in " + path.string());
  }
  return s;
}

void write_ticks_csv(const std::filesystem::path& path, const std::string& symbol,
                     std::span<const std::int64_t> timestamps_ms,
                     std::span<const double> prices) {
  if (timestamps_ms.size() != prices.size()) {
    throw ConfigError("tick timestamp and price arrays must match in length");
  }
  std::string out = "timestamp_ms,symbol,price\n";
  out.reserve(out.size() + prices.size() * (symbol.size() + 32));
  for (std::size_t i = 0; i < prices.size(); ++i) {
    out += std::to_string(timestamps_ms[i]);
    out.push_back(',');
    out += symbol;
    out.push_back(',');
    append_double(out, prices[i]);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::uint64_t max_rows) {
  if (traj.values.size() > max_rows) {
    throw ConfigError("trajectory dump exceeds row limit (" +
                      std::to_string(traj.values.size()) + " > " +
                      std::to_string(max_rows) + ")");
  }
  std::string out = "t_scaled,x\n";
  out.reserve(out.size() + traj.values.size() * 24);
  for (std::size_t i = 0; i < traj.values.size(); ++i) {
    append_double(out, traj.times_scaled[i]);
    out.push_back(',');
    append_double(out, traj.values[i]);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

std::uint64_t fnv1a64_bytes(std::span<const char> bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return fnv1a64_bytes(std::span<const char>(text.data(), text.size()));
}

}  // namespace retssim
