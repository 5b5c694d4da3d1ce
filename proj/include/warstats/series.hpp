#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <ostream>
#include <vector>

#include "warstats/catalog.hpp"
#include "warstats/csv.hpp"

namespace warstats {

/// Which year a war is counted in.
enum class Attribution { end_year, start_year };

/// How many catalog records went into a series and why others were skipped.
struct SeriesCounts {
  std::size_t included = 0;
  std::size_t missing_fatalities = 0;
  std::size_t outside_window = 0;
};

/// One value per calendar year of the window; years without wars hold 0.
struct AnnualSeries {
  int start_year = 0;
  std::vector<double> values;
  SeriesCounts counts;

  [[nodiscard]] int year_at(std::size_t i) const { return start_year + static_cast<int>(i); }
  [[nodiscard]] std::size_t size() const { return values.size(); }
};

struct Event {
  std::size_t ordinal = 0;
  int year = 0;  // year the value is attributed to (end year)
  double value = 0;
};

/// One value per war in chronological order.
struct EventSeries {
  std::vector<Event> events;
  SeriesCounts counts;

  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(events.size());
    for (const auto& e : events) v.push_back(e.value);
    return v;
  }
  [[nodiscard]] std::size_t size() const { return events.size(); }
};

inline AnnualSeries wars_per_year(const ConflictCatalog& catalog,
                                  Attribution attribution = Attribution::end_year) {
  const auto& w = catalog.window;
  AnnualSeries s{w.first, std::vector<double>(w.length(), 0.0), {}};
  for (const auto& r : catalog.records) {
    const int year = attribution == Attribution::end_year ? r.end_year : r.start_year;
    if (!w.contains(year)) {
      ++s.counts.outside_window;
      continue;
    }
    s.values[static_cast<std::size_t>(year - w.first)] += 1.0;
    ++s.counts.included;
  }
  return s;
}

/// Each war's full fatality total lands in its end year.
inline AnnualSeries fatalities_per_year(const ConflictCatalog& catalog) {
  const auto& w = catalog.window;
  std::vector<std::uint64_t> totals(w.length(), 0);
  SeriesCounts counts;
  for (const auto& r : catalog.records) {
    if (!r.fatalities) {
      ++counts.missing_fatalities;
      continue;
    }
    if (!w.contains(r.end_year)) {
      ++counts.outside_window;
      continue;
    }
    totals[static_cast<std::size_t>(r.end_year - w.first)] += *r.fatalities;
    ++counts.included;
  }
  AnnualSeries s{w.first, {}, counts};
  s.values.reserve(totals.size());
  for (auto t : totals) s.values.push_back(static_cast<double>(t));
  return s;
}

/// Wars with a fatality count, ordered by (start_year, end_year, catalog row).
inline EventSeries fatalities_per_war(const ConflictCatalog& catalog) {
  std::vector<const ConflictRecord*> wars;
  EventSeries s;
  for (const auto& r : catalog.records) {
    if (!r.fatalities) {
      ++s.counts.missing_fatalities;
      continue;
    }
    if (!catalog.window.contains(r.end_year)) {
      ++s.counts.outside_window;
      continue;
    }
    wars.push_back(&r);
  }
  std::stable_sort(wars.begin(), wars.end(), [](const auto* a, const auto* b) {
    return std::tie(a->start_year, a->end_year, a->id) < std::tie(b->start_year, b->end_year, b->id);
  });
  s.events.reserve(wars.size());
  for (std::size_t i = 0; i < wars.size(); ++i) {
    s.events.push_back({i, wars[i]->end_year, static_cast<double>(*wars[i]->fatalities)});
  }
  s.counts.included = wars.size();
  return s;
}

/// Divides every value by the world population of its year.
inline AnnualSeries normalize_per_capita(const AnnualSeries& series, const PopulationTable& table) {
  AnnualSeries out = series;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double pop = table.at(out.year_at(i));
    out.values[i] = out.values[i] == 0.0 ? 0.0 : out.values[i] / pop;
  }
  return out;
}

inline EventSeries normalize_per_capita(const EventSeries& series, const PopulationTable& table) {
  EventSeries out = series;
  for (auto& e : out.events) {
    const double pop = table.at(e.year);
    e.value = e.value == 0.0 ? 0.0 : e.value / pop;
  }
  return out;
}

inline void write_series(std::ostream& out, const AnnualSeries& s) {
  out << "year,value\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    out << s.year_at(i) << ',' << csv::format_double(s.values[i]) << '\n';
  }
}

inline void write_series(std::ostream& out, const EventSeries& s) {
  out << "ordinal,value\n";
  for (const auto& e : s.events) out << e.ordinal << ',' << csv::format_double(e.value) << '\n';
}

}  // namespace warstats
