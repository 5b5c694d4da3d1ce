#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "warstats/csv.hpp"

namespace warstats {

/// P(X >= x) sampled on a threshold grid.
struct EmpiricalCcdf {
  std::vector<double> grid;   // strictly increasing thresholds
  std::vector<double> probs;  // non-increasing, in [0, 1]
  std::size_t n_samples = 0;

  [[nodiscard]] std::size_t size() const { return grid.size(); }
};

namespace detail {

inline std::vector<double> sorted_samples(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ccdf: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double s : sorted) {
    if (!std::isfinite(s)) throw std::invalid_argument("ccdf: non-finite sample");
  }
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

inline EmpiricalCcdf ccdf_on_grid(const std::vector<double>& sorted, std::vector<double> grid) {
  EmpiricalCcdf c;
  c.n_samples = sorted.size();
  const double n = static_cast<double>(sorted.size());
  c.probs.reserve(grid.size());
  for (double x : grid) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    c.probs.push_back(static_cast<double>(static_cast<std::ptrdiff_t>(sorted.size()) - below) / n);
  }
  c.grid = std::move(grid);
  return c;
}

}  // namespace detail

/// Empirical CCDF on the uniform grid step, 2*step, ... up to max(samples).
/// Zero-valued samples should be removed by the caller when they stand for
/// "no event" rather than an observation.
inline EmpiricalCcdf empirical_ccdf(std::span<const double> samples, double step) {
  if (!(step > 0) || !std::isfinite(step)) throw std::invalid_argument("ccdf: step must be positive");
  const auto sorted = detail::sorted_samples(samples);
  const double max = sorted.back();
  std::vector<double> grid;
  for (std::size_t k = 1;; ++k) {
    const double x = static_cast<double>(k) * step;
    if (x > max) break;
    grid.push_back(x);
  }
  return detail::ccdf_on_grid(sorted, std::move(grid));
}

/// Empirical CCDF on `points` geometrically spaced thresholds from the
/// smallest to the largest positive sample.
inline EmpiricalCcdf empirical_ccdf_log(std::span<const double> samples, std::size_t points) {
  if (points < 2) throw std::invalid_argument("ccdf: log grid needs at least 2 points");
  const auto sorted = detail::sorted_samples(samples);
  const auto first_pos = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
  if (first_pos == sorted.end()) throw std::invalid_argument("ccdf: log grid needs positive samples");
  const double lo = std::log(*first_pos);
  const double hi = std::log(sorted.back());
  std::vector<double> grid;
  if (hi == lo) {
    grid.push_back(sorted.back());
  } else {
    for (std::size_t k = 0; k < points; ++k) {
      const double x = k + 1 == points ? sorted.back()
                                       : std::exp(lo + (hi - lo) * static_cast<double>(k) /
                                                           static_cast<double>(points - 1));
      if (grid.empty() || x > grid.back()) grid.push_back(x);
    }
  }
  return detail::ccdf_on_grid(sorted, std::move(grid));
}

/// Drops zeros (and negatives), which mark years without any war.
inline std::vector<double> positive_only(std::span<const double> values) {
  std::vector<double> out;
  std::copy_if(values.begin(), values.end(), std::back_inserter(out), [](double v) { return v > 0; });
  return out;
}

inline void write_ccdf(std::ostream& out, const EmpiricalCcdf& c) {
  out << "x,prob\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    out << csv::format_double(c.grid[i]) << ',' << csv::format_double(c.probs[i]) << '\n';
  }
}

}  // namespace warstats
