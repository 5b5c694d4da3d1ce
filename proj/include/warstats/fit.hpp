#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "warstats/ccdf.hpp"
#include "warstats/error.hpp"
#include "warstats/goodness.hpp"
#include "warstats/nls.hpp"

namespace warstats {

/// y = a * x^b
struct PowerLawModel {
  static constexpr std::size_t kParams = 2;
  using Params = std::array<double, kParams>;

  double a = 1;
  double b = -1;

  [[nodiscard]] Params params() const { return {a, b}; }
  static PowerLawModel from(const Params& p) { return {p[0], p[1]}; }

  [[nodiscard]] double operator()(double x) const { return a * std::pow(x, b); }
  double value(double x, const Params& p) const { return p[0] * std::pow(x, p[1]); }
  Params gradient(double x, const Params& p) const {
    const double xb = std::pow(x, p[1]);
    return {xb, p[0] * xb * std::log(x)};
  }
};

/// y = a1 * exp(-((ln x - b1) / c1)^2): a Gaussian on the log-x axis.
struct LogGaussianModel {
  static constexpr std::size_t kParams = 3;
  using Params = std::array<double, kParams>;

  double a1 = 1;
  double b1 = 0;
  double c1 = 1;

  [[nodiscard]] Params params() const { return {a1, b1, c1}; }
  static LogGaussianModel from(const Params& p) { return {p[0], p[1], std::abs(p[2])}; }

  [[nodiscard]] double operator()(double x) const { return value(x, params()); }
  double value(double x, const Params& p) const {
    const double z = (std::log(x) - p[1]) / p[2];
    return p[0] * std::exp(-z * z);
  }
  Params gradient(double x, const Params& p) const {
    const double z = (std::log(x) - p[1]) / p[2];
    const double e = std::exp(-z * z);
    return {e, p[0] * e * 2.0 * z / p[2], p[0] * e * 2.0 * z * z / p[2]};
  }
};

struct FitRange {
  double lo = 0;
  double hi = 0;

  /// Parses `LO:HI`; either side may be empty for an open end.
  static FitRange parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("fit range must be LO:HI, got '" + std::string(text) + "'");
    }
    const auto lo_s = csv::trim(text.substr(0, colon));
    const auto hi_s = csv::trim(text.substr(colon + 1));
    FitRange r{-HUGE_VAL, HUGE_VAL};
    if (!lo_s.empty()) r.lo = csv::parse_double(lo_s).value_or(NAN);
    if (!hi_s.empty()) r.hi = csv::parse_double(hi_s).value_or(NAN);
    if (std::isnan(r.lo) || std::isnan(r.hi) || r.lo > r.hi) {
      throw std::invalid_argument("invalid fit range '" + std::string(text) + "'");
    }
    return r;
  }
};

struct FitResult {
  std::variant<PowerLawModel, LogGaussianModel> model;
  double sse = 0;
  double r2 = 0;
  double adj_r2 = 0;
  double rmse = 0;
  bool r2_defined = true;
  std::size_t n_points = 0;
  FitRange range;  // first and last grid x actually used
  int iterations = 0;
  bool converged = false;

  [[nodiscard]] double predict(double x) const {
    return std::visit([x](const auto& m) { return m(x); }, model);
  }
  [[nodiscard]] std::string model_name() const {
    return std::holds_alternative<PowerLawModel>(model) ? "power_law" : "log_gaussian";
  }
};

namespace detail {

struct Selected {
  std::vector<double> xs;
  std::vector<double> ys;
};

inline Selected select_points(const EmpiricalCcdf& ccdf, const std::optional<FitRange>& range,
                              std::size_t min_points) {
  Selected s;
  for (std::size_t i = 0; i < ccdf.grid.size(); ++i) {
    const double x = ccdf.grid[i];
    if (range && (x < range->lo || x > range->hi)) continue;
    if (!(x > 0)) throw std::invalid_argument("fit: grid x must be positive");
    if (!(ccdf.probs[i] > 0)) throw std::invalid_argument("fit: zero or negative probability in range");
    s.xs.push_back(x);
    s.ys.push_back(ccdf.probs[i]);
  }
  if (s.xs.size() < min_points) {
    throw std::invalid_argument("fit: need at least " + std::to_string(min_points) +
                                " grid points in range, have " + std::to_string(s.xs.size()));
  }
  return s;
}

template <class Model>
FitResult finish(const Model& model, const Selected& pts, int iterations, bool converged) {
  std::vector<double> predicted;
  predicted.reserve(pts.xs.size());
  for (double x : pts.xs) predicted.push_back(model(x));
  const auto g = goodness(pts.ys, predicted, Model::kParams);
  FitResult r;
  r.model = model;
  r.sse = g.sse;
  r.r2 = g.r2;
  r.adj_r2 = g.adj_r2;
  r.rmse = g.rmse;
  r.r2_defined = g.r2_defined;
  r.n_points = pts.xs.size();
  r.range = {pts.xs.front(), pts.xs.back()};
  r.iterations = iterations;
  r.converged = converged;
  return r;
}

}  // namespace detail

/// Ordinary least squares on (ln x, ln y); used to seed the power-law fit.
inline PowerLawModel loglog_power_law(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double su = 0, sv = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    su += std::log(xs[i]);
    sv += std::log(ys[i]);
  }
  const double mu = su / n, mv = sv / n;
  double suu = 0, suv = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double du = std::log(xs[i]) - mu;
    suu += du * du;
    suv += du * (std::log(ys[i]) - mv);
  }
  const double b = suu > 0 ? suv / suu : 0.0;
  return {std::exp(mv - b * mu), b};
}

/// Least-squares fit of a*x^b to the CCDF in linear probability space over the
/// grid points inside `range` (all points when absent).
// Log-log slope, with the amplitude refit in linear space for that slope. The
// plain log-log intercept is pulled around by the sparse flat steps at the far
// end of an empirical tail.
inline PowerLawModel power_law_seed(std::span<const double> xs, std::span<const double> ys) {
  const double b = loglog_power_law(xs, ys).b;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::pow(xs[i], b);
    num += ys[i] * f;
    den += f * f;
  }
  return {den > 0 && std::isfinite(num / den) ? num / den : loglog_power_law(xs, ys).a, b};
}

inline FitResult fit_power_law(const EmpiricalCcdf& ccdf, std::optional<FitRange> range = std::nullopt,
                               const NlsOptions& opts = {}, std::optional<PowerLawModel> init = std::nullopt) {
  const auto pts = detail::select_points(ccdf, range, 3);
  const PowerLawModel seed = init.value_or(power_law_seed(pts.xs, pts.ys));
  const auto sol = nls_solve(PowerLawModel{}, seed.params(), pts.xs, pts.ys, opts);
  return detail::finish(PowerLawModel::from(sol.params), pts, sol.iterations, sol.converged);
}

/// Amplitude, probability-weighted mean and standard deviation of ln x.
inline LogGaussianModel moment_log_gaussian(std::span<const double> xs, std::span<const double> ys) {
  double w = 0, m = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    w += ys[i];
    m += ys[i] * std::log(xs[i]);
  }
  m /= w;
  double v = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = std::log(xs[i]) - m;
    v += ys[i] * d * d;
  }
  const double sd = std::sqrt(v / w);
  return {*std::max_element(ys.begin(), ys.end()), m, sd > 0 ? sd : 1.0};
}

/// Least-squares fit of a1*exp(-((ln x - b1)/c1)^2) to the CCDF in linear
/// probability space.
inline FitResult fit_log_gaussian(const EmpiricalCcdf& ccdf, std::optional<FitRange> range = std::nullopt,
                                  const NlsOptions& opts = {},
                                  std::optional<LogGaussianModel> init = std::nullopt) {
  const auto pts = detail::select_points(ccdf, range, 4);
  const LogGaussianModel seed = init.value_or(moment_log_gaussian(pts.xs, pts.ys));
  const auto sol = nls_solve(LogGaussianModel{}, seed.params(), pts.xs, pts.ys, opts);
  return detail::finish(LogGaussianModel::from(sol.params), pts, sol.iterations, sol.converged);
}

/// Power-law fit restricted to the right tail x >= x_min.
inline FitResult fit_tail(const EmpiricalCcdf& ccdf, double x_min, const NlsOptions& opts = {}) {
  if (!(x_min > 0)) throw std::invalid_argument("fit_tail: x_min must be positive");
  return fit_power_law(ccdf, FitRange{x_min, HUGE_VAL}, opts);
}

/// Grid range with the lowest and highest `fraction` of grid points removed.
inline FitRange trimmed_range(const EmpiricalCcdf& ccdf, double fraction = 0.1) {
  if (ccdf.grid.empty()) throw std::invalid_argument("trimmed_range: empty ccdf");
  if (!(fraction >= 0 && fraction < 0.5)) throw std::invalid_argument("trimmed_range: fraction in [0, 0.5)");
  const std::size_t n = ccdf.grid.size();
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  return {ccdf.grid[k], ccdf.grid[n - 1 - k]};
}

/// Grid point closest to the q-quantile (nearest rank) of the samples.
inline double tail_threshold(const EmpiricalCcdf& ccdf, std::span<const double> samples, double q = 0.9) {
  if (samples.empty() || ccdf.grid.empty()) throw std::invalid_argument("tail_threshold: empty input");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  const double target = sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
  const auto it = std::min_element(ccdf.grid.begin(), ccdf.grid.end(), [target](double a, double b) {
    return std::abs(a - target) < std::abs(b - target);
  });
  return *it;
}

inline nlohmann::ordered_json to_json(const FitResult& r) {
  nlohmann::ordered_json params;
  if (const auto* p = std::get_if<PowerLawModel>(&r.model)) {
    params["a"] = p->a;
    params["b"] = p->b;
  } else {
    const auto& g = std::get<LogGaussianModel>(r.model);
    params["a1"] = g.a1;
    params["b1"] = g.b1;
    params["c1"] = g.c1;
  }
  nlohmann::ordered_json j;
  j["model"] = r.model_name();
  j["params"] = params;
  j["sse"] = r.sse;
  j["r2"] = r.r2;
  j["adj_r2"] = r.adj_r2;
  j["rmse"] = r.rmse;
  j["n_points"] = r.n_points;
  j["range"] = {r.range.lo, r.range.hi};
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

}  // namespace warstats
