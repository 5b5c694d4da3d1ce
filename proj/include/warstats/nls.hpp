#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "warstats/error.hpp"

namespace warstats {

/// A curve y = f(x; params) with an analytic gradient in the parameters.
template <class M>
concept CurveModel = requires(const M& m, double x, const typename M::Params& p) {
  { M::kParams } -> std::convertible_to<std::size_t>;
  { m.value(x, p) } -> std::convertible_to<double>;
  { m.gradient(x, p) } -> std::same_as<typename M::Params>;
};

struct NlsOptions {
  double rtol = 1e-12;  // stop when an accepted step improves SSE by less than rtol*SSE
  double atol = 1e-14;  // stop when ||step|| < atol * (atol + ||params||)
  int max_iterations = 1000;
};

template <std::size_t N>
struct NlsResult {
  std::array<double, N> params{};
  double sse = 0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

template <CurveModel M>
double sum_squares(const M& model, const typename M::Params& p, std::span<const double> xs,
                   std::span<const double> ys) {
  double sse = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - model.value(xs[i], p);
    sse += r * r;
  }
  return sse;
}

template <std::size_t N>
double norm(const std::array<double, N>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

/// Damped Gauss-Newton (Levenberg-Marquardt) least squares.
///
/// Starts undamped, so a model linear in its parameters is solved by the first
/// step. A rejected or singular step raises the damping term lambda*diag(J'J);
/// an accepted one lowers it again. Accepted steps never increase SSE. If the
/// damping overflows before the tolerances are met the best point so far is
/// returned with `converged == false`.
template <CurveModel M>
NlsResult<M::kParams> nls_solve(const M& model, typename M::Params init, std::span<const double> xs,
                                std::span<const double> ys, const NlsOptions& opts = {}) {
  constexpr std::size_t N = M::kParams;
  using Mat = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;
  using Vec = Eigen::Matrix<double, static_cast<int>(N), 1>;

  if (xs.size() != ys.size()) throw std::invalid_argument("nls: x/y length mismatch");
  if (xs.size() < N + 1) throw std::invalid_argument("nls: need at least dim(params)+1 points");
  for (double v : init) {
    if (!std::isfinite(v)) throw std::invalid_argument("nls: initial parameters must be finite");
  }

  NlsResult<N> res;
  res.params = init;
  res.sse = detail::sum_squares(model, res.params, xs, ys);
  if (!std::isfinite(res.sse)) throw NumericError("nls: model is not finite at the initial parameters");
  if (res.sse == 0) {
    res.converged = true;
    return res;
  }

  constexpr double kLambdaStart = 1e-3;
  constexpr double kLambdaMax = 1e32;
  double lambda = 0;

  while (res.iterations < opts.max_iterations) {
    ++res.iterations;

    Mat jtj = Mat::Zero();
    Vec jtr = Vec::Zero();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto g = model.gradient(xs[i], res.params);
      const double r = ys[i] - model.value(xs[i], res.params);
      for (std::size_t a = 0; a < N; ++a) {
        jtr(a) += g[a] * r;
        for (std::size_t b = 0; b < N; ++b) jtj(a, b) += g[a] * g[b];
      }
    }
    // Column scaling makes the damping Marquardt's lambda*diag(J'J) and keeps
    // parameters of very different magnitude well conditioned.
    Vec scale;
    for (std::size_t a = 0; a < N; ++a) {
      scale(a) = jtj(a, a) > 0 ? 1.0 / std::sqrt(jtj(a, a)) : 1.0;
    }
    const Mat scaled = scale.asDiagonal() * jtj * scale.asDiagonal();
    const Vec rhs = scale.asDiagonal() * jtr;

    bool accepted = false;
    while (!accepted) {
      const Mat lhs = scaled + lambda * Mat::Identity();
      Eigen::LDLT<Mat> ldlt(lhs);
      bool usable = ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-14;
      Vec step = Vec::Zero();
      if (usable) {
        step = scale.asDiagonal() * ldlt.solve(rhs);
        usable = step.allFinite();
      }
      if (usable) {
        typename M::Params delta{};
        typename M::Params trial = res.params;
        for (std::size_t a = 0; a < N; ++a) {
          delta[a] = step(a);
          trial[a] += step(a);
        }
        if (detail::norm(delta) < opts.atol * (opts.atol + detail::norm(res.params))) {
          res.converged = true;
          return res;
        }
        const double trial_sse = detail::sum_squares(model, trial, xs, ys);
        if (std::isfinite(trial_sse) && trial_sse <= res.sse) {
          const double improvement = res.sse - trial_sse;
          res.params = trial;
          res.sse = trial_sse;
          accepted = true;
          if (trial_sse == 0 || improvement <= opts.rtol * (improvement + trial_sse)) {
            res.converged = true;
            return res;
          }
          lambda = lambda < 1e-9 ? 0.0 : lambda / 10.0;
          break;
        }
      }
      lambda = lambda == 0 ? kLambdaStart : lambda * 10.0;
      if (lambda > kLambdaMax) return res;
    }
  }
  return res;
}

}  // namespace warstats
