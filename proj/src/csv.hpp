#pragma once

// Minimal CSV reader for the flat, unquoted files this tool exchanges.

#include <charconv>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tvflow::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line
  std::vector<std::string> fields;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

/// Reads all non-blank lines. A UTF-8 BOM on the first line is dropped.
inline std::vector<Row> read(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view v = line;
    if (n == 1 && v.starts_with("\xEF\xBB\xBF")) v.remove_prefix(3);
    v = trim(v);
    if (v.empty()) continue;
    Row r{n, {}};
    std::size_t pos = 0;
    while (true) {
      auto comma = v.find(',', pos);
      r.fields.emplace_back(trim(v.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::optional<double> to_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Shortest round-trip decimal form ("1225", "0.5").
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace tvflow::csv
