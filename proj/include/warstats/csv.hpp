#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "warstats/error.hpp"

namespace warstats::csv {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Splits one CSV record. Fields may be double-quoted; a doubled quote inside
/// a quoted field is a literal quote. Unquoted fields are trimmed.
inline std::vector<std::string> split(std::string_view line, char delim = ',') {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == delim) {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

inline std::string quote(std::string_view field, char delim = ',') {
  if (field.find_first_of(std::string{delim, '"', '\n', '\r'}) == std::string_view::npos &&
      trim(field) == field) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Reads lines, skipping blank ones; strips a UTF-8 BOM from the first line.
inline bool next_record(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (!trim(line).empty()) return true;
  }
  return false;
}

struct Column {
  std::string key_header;
  std::vector<double> keys;
  std::vector<double> values;
};

/// Two-column numeric CSV with a header (`year,value`, `ordinal,value`, `x,prob`).
/// Extra columns are ignored.
inline Column read_two_column(std::istream& in, char delim = ',') {
  Column col;
  std::string line;
  std::size_t line_no = 0;
  if (!next_record(in, line, line_no)) throw FormatError("empty CSV input");
  const auto header = split(line, delim);
  if (header.size() < 2) throw FormatError("CSV header needs at least two columns");
  col.key_header = header[0];
  while (next_record(in, line, line_no)) {
    const auto fields = split(line, delim);
    if (fields.size() < 2) {
      throw FormatError("line " + std::to_string(line_no) + ": expected two columns");
    }
    const auto k = parse_double(fields[0]);
    const auto v = parse_double(fields[1]);
    if (!k || !v) {
      throw FormatError("line " + std::to_string(line_no) + ": non-numeric field");
    }
    col.keys.push_back(*k);
    col.values.push_back(*v);
  }
  return col;
}

}  // namespace warstats::csv
