#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace warstats {

struct Goodness {
  double sse = 0;
  double r2 = 0;
  double adj_r2 = 0;
  double rmse = 0;
  bool r2_defined = true;  // false when the observations have zero variance
};

/// SSE, R^2, adjusted R^2 and RMSE of `predicted` against `observed`.
/// R^2 and adjusted R^2 are NaN when undefined: zero variance in `observed`,
/// or (adjusted only) no residual degrees of freedom, n <= n_params + 1.
inline Goodness goodness(std::span<const double> observed, std::span<const double> predicted,
                         std::size_t n_params) {
  if (observed.size() != predicted.size()) throw std::invalid_argument("goodness: length mismatch");
  const std::size_t n = observed.size();
  if (n < 2) throw std::invalid_argument("goodness: need at least 2 points");

  double mean = 0;
  bool constant = true;
  for (double o : observed) {
    mean += o;
    constant = constant && o == observed[0];
  }
  mean /= static_cast<double>(n);

  Goodness g;
  double sst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = observed[i] - predicted[i];
    g.sse += e * e;
    sst += (observed[i] - mean) * (observed[i] - mean);
  }
  g.rmse = std::sqrt(g.sse / static_cast<double>(n));

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (constant || sst == 0) {
    g.r2_defined = false;
    g.r2 = nan;
    g.adj_r2 = nan;
    return g;
  }
  g.r2 = 1.0 - g.sse / sst;
  if (n > n_params + 1) {
    g.adj_r2 = 1.0 - (1.0 - g.r2) * (static_cast<double>(n - 1) / static_cast<double>(n - n_params - 1));
  } else {
    g.adj_r2 = nan;
  }
  return g;
}

}  // namespace warstats
