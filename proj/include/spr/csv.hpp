#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spr/error.hpp"

/// Minimal CSV tokenizing and number formatting shared by the file readers and writers.
namespace spr::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Full-precision decimal parse of the whole token. Rejects NaN and infinities.
inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// %.{digits}g, locale independent.
inline std::string format(double v, int significant_digits = 12) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
  return buf;
}

[[noreturn]] inline void parse_fail(const std::string& where, std::size_t line, const std::string& what) {
  fail(ErrorKind::parse, where, "line " + std::to_string(line) + ": " + what);
}

/// Calls on_row(fields, line_no) for each data row. Blank lines and lines
/// starting with '#' are skipped; the first remaining line must equal `header`.
template <typename OnRow>
void read_csv(std::istream& in, std::string_view header, const std::string& where, OnRow&& on_row) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!seen_header) {
      if (body != header) parse_fail(where, line_no, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    on_row(split(body), line_no);
  }
}

}  // namespace spr::csv
