#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "warstats/csv.hpp"
#include "warstats/error.hpp"

namespace warstats {

/// Inclusive range of calendar years.
struct YearRange {
  int first = 1400;
  int last = 2000;

  [[nodiscard]] bool contains(int year) const { return first <= year && year <= last; }
  [[nodiscard]] std::size_t length() const { return static_cast<std::size_t>(last - first + 1); }

  /// Parses `LO:HI`.
  static YearRange parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("year range must be LO:HI, got '" + std::string(text) + "'");
    }
    const auto lo = csv::parse_int(text.substr(0, colon));
    const auto hi = csv::parse_int(text.substr(colon + 1));
    if (!lo || !hi || *lo > *hi) {
      throw std::invalid_argument("invalid year range '" + std::string(text) + "'");
    }
    return {static_cast<int>(*lo), static_cast<int>(*hi)};
  }

  friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct ConflictRecord {
  std::size_t id = 0;  // 0-based data row in the source file
  std::string name;
  int start_year = 0;
  int end_year = 0;
  std::optional<std::uint64_t> fatalities;

  friend bool operator==(const ConflictRecord&, const ConflictRecord&) = default;
};

struct ParseReport {
  std::size_t retained = 0;
  std::size_t missing_fatalities = 0;  // retained, but with no usable fatality count
  std::size_t rejected = 0;            // bad year fields or start_year > end_year
  std::size_t outside_window = 0;      // well-formed, end_year outside the window
  std::vector<std::string> messages;
};

struct ConflictCatalog {
  std::vector<ConflictRecord> records;  // source order
  YearRange window;
  ParseReport report;

  [[nodiscard]] std::uint64_t total_fatalities() const {
    std::uint64_t total = 0;
    for (const auto& r : records) total += r.fatalities.value_or(0);
    return total;
  }
};

namespace detail {

// Non-negative integer, or an integral value written in float notation ("1.5e6").
inline std::optional<std::uint64_t> parse_fatalities(std::string_view s) {
  s = csv::trim(s);
  if (s.empty()) return std::nullopt;
  if (const auto i = csv::parse_int(s)) {
    if (*i < 0) return std::nullopt;
    return static_cast<std::uint64_t>(*i);
  }
  const auto d = csv::parse_double(s);
  if (!d || !std::isfinite(*d) || *d < 0 || *d != std::floor(*d) || *d >= 1.8e19) {
    return std::nullopt;
  }
  return static_cast<std::uint64_t>(*d);
}

}  // namespace detail

/// Reads a conflict catalog. The header must name the columns `name`,
/// `start_year`, `end_year` and `fatalities` (any order, extra columns allowed).
/// Rows with unreadable years are rejected and counted; rows with an empty or
/// unreadable fatality field are kept with the count absent.
inline ConflictCatalog parse_catalog(std::istream& in, YearRange window = {}, char delim = ',') {
  if (window.first > window.last) throw std::invalid_argument("window first year after last year");
  ConflictCatalog cat;
  cat.window = window;

  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no)) throw FormatError("catalog: empty input");

  const auto header = csv::split(line, delim);
  auto column = [&](std::string_view name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw FormatError("catalog: header is missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_name = column("name");
  const std::size_t c_start = column("start_year");
  const std::size_t c_end = column("end_year");
  const std::size_t c_fat = column("fatalities");
  const std::size_t needed = std::max({c_name, c_start, c_end, c_fat}) + 1;

  std::size_t row = 0;
  while (csv::next_record(in, line, line_no)) {
    const std::size_t id = row++;
    auto fields = csv::split(line, delim);
    // A trailing empty fatalities column is often dropped by spreadsheet exports.
    if (fields.size() + 1 == needed && c_fat + 1 == needed) fields.emplace_back();
    auto reject = [&](const std::string& why) {
      ++cat.report.rejected;
      cat.report.messages.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() < needed) {
      reject("expected " + std::to_string(needed) + " fields, got " + std::to_string(fields.size()));
      continue;
    }
    const auto start = csv::parse_int(fields[c_start]);
    const auto end = csv::parse_int(fields[c_end]);
    if (!start || !end) {
      reject("non-integer year field");
      continue;
    }
    if (*start > *end) {
      reject("start_year after end_year");
      continue;
    }
    if (!window.contains(static_cast<int>(*end))) {
      ++cat.report.outside_window;
      continue;
    }
    ConflictRecord rec;
    rec.id = id;
    rec.name = fields[c_name];
    rec.start_year = static_cast<int>(*start);
    rec.end_year = static_cast<int>(*end);
    rec.fatalities = detail::parse_fatalities(fields[c_fat]);
    if (!rec.fatalities) ++cat.report.missing_fatalities;
    cat.records.push_back(std::move(rec));
  }
  cat.report.retained = cat.records.size();
  return cat;
}

/// Writes records in the same CSV layout `parse_catalog` reads.
inline void write_catalog(std::ostream& out, const std::vector<ConflictRecord>& records,
                          char delim = ',') {
  out << "name" << delim << "start_year" << delim << "end_year" << delim << "fatalities\n";
  for (const auto& r : records) {
    out << csv::quote(r.name, delim) << delim << r.start_year << delim << r.end_year << delim;
    if (r.fatalities) out << *r.fatalities;
    out << '\n';
  }
}

enum class Interpolation { log_linear, linear };

struct PopulationAnchor {
  int year = 0;
  double population = 0;  // persons

  friend bool operator==(const PopulationAnchor&, const PopulationAnchor&) = default;
};

class PopulationTable {
 public:
  /// Sorts the anchors by year. Throws on fewer than two anchors, duplicate
  /// years, or a population that is not finite and positive.
  explicit PopulationTable(std::vector<PopulationAnchor> anchors,
                           Interpolation mode = Interpolation::log_linear)
      : anchors_(std::move(anchors)), mode_(mode) {
    if (anchors_.size() < 2) throw FormatError("population table needs at least 2 anchors");
    std::sort(anchors_.begin(), anchors_.end(),
              [](const auto& a, const auto& b) { return a.year < b.year; });
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
      if (!std::isfinite(anchors_[i].population) || anchors_[i].population <= 0) {
        throw FormatError("population must be positive (year " +
                          std::to_string(anchors_[i].year) + ")");
      }
      if (i > 0 && anchors_[i].year == anchors_[i - 1].year) {
        throw FormatError("duplicate population year " + std::to_string(anchors_[i].year));
      }
    }
  }

  [[nodiscard]] const std::vector<PopulationAnchor>& anchors() const { return anchors_; }
  [[nodiscard]] Interpolation mode() const { return mode_; }
  [[nodiscard]] YearRange span() const { return {anchors_.front().year, anchors_.back().year}; }

  [[nodiscard]] PopulationTable with_mode(Interpolation mode) const {
    PopulationTable copy = *this;
    copy.mode_ = mode;
    return copy;
  }

  /// World population in `year`: exact at anchors, geometric (or linear)
  /// interpolation between them, no extrapolation.
  [[nodiscard]] double at(int year) const {
    if (!span().contains(year)) {
      throw RangeError("year " + std::to_string(year) + " outside population table [" +
                       std::to_string(anchors_.front().year) + ", " +
                       std::to_string(anchors_.back().year) + "]");
    }
    const auto hi = std::lower_bound(anchors_.begin(), anchors_.end(), year,
                                     [](const auto& a, int y) { return a.year < y; });
    if (hi->year == year) return hi->population;
    const auto lo = std::prev(hi);
    const double t = static_cast<double>(year - lo->year) / static_cast<double>(hi->year - lo->year);
    if (mode_ == Interpolation::linear) {
      return lo->population + t * (hi->population - lo->population);
    }
    return lo->population * std::pow(hi->population / lo->population, t);
  }

 private:
  std::vector<PopulationAnchor> anchors_;
  Interpolation mode_;
};

inline double population_at(const PopulationTable& table, int year) { return table.at(year); }

/// Reads a `year,population` CSV. Population may be integer or scientific notation.
inline PopulationTable parse_population(std::istream& in, char delim = ',',
                                        Interpolation mode = Interpolation::log_linear) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no)) throw FormatError("population: empty input");
  const auto header = csv::split(line, delim);
  const auto c_year = std::find(header.begin(), header.end(), "year");
  const auto c_pop = std::find(header.begin(), header.end(), "population");
  if (c_year == header.end() || c_pop == header.end()) {
    throw FormatError("population: header must contain 'year' and 'population'");
  }
  const auto iy = static_cast<std::size_t>(c_year - header.begin());
  const auto ip = static_cast<std::size_t>(c_pop - header.begin());

  std::vector<PopulationAnchor> anchors;
  while (csv::next_record(in, line, line_no)) {
    const auto fields = csv::split(line, delim);
    const auto where = "population line " + std::to_string(line_no) + ": ";
    if (fields.size() <= std::max(iy, ip)) throw FormatError(where + "too few fields");
    const auto year = csv::parse_int(fields[iy]);
    const auto pop = csv::parse_double(fields[ip]);
    if (!year) throw FormatError(where + "non-integer year");
    if (!pop) throw FormatError(where + "non-numeric population");
    anchors.push_back({static_cast<int>(*year), *pop});
  }
  return PopulationTable(std::move(anchors), mode);
}

}  // namespace warstats
