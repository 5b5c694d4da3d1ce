#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "warstats/csv.hpp"
#include "warstats/error.hpp"
#include "warstats/fft.hpp"

namespace warstats {

namespace detail {

inline std::vector<double> demeaned(std::span<const double> y) {
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::vector<double> d(y.size());
  std::transform(y.begin(), y.end(), d.begin(), [mean](double v) { return v - mean; });
  return d;
}

inline void require_length(std::span<const double> y, std::size_t min, const char* who) {
  if (y.size() < min) {
    throw std::invalid_argument(std::string(who) + ": series needs at least " + std::to_string(min) +
                                " values");
  }
}

}  // namespace detail

/// Biased lag-`lag` autocovariance: (1/T) * sum_{t} (y_t - mean)(y_{t+lag} - mean).
/// The divisor is T at every lag.
inline double autocovariance(std::span<const double> y, std::size_t lag) {
  detail::require_length(y, 2, "autocovariance");
  if (lag >= y.size()) throw RangeError("autocovariance: lag must be below the series length");
  const auto d = detail::demeaned(y);
  double s = 0;
  for (std::size_t t = 0; t + lag < d.size(); ++t) s += d[t] * d[t + lag];
  return s / static_cast<double>(d.size());
}

struct AcfResult {
  std::vector<double> r;            // lags 0..T-1
  std::vector<double> se_bartlett;  // sqrt((1 + 2 * sum_{k<i} r_k^2) / T)
  double se_white = 0;              // sqrt(1/T)
  std::size_t T = 0;
};

namespace detail {

inline AcfResult finish_acf(std::vector<double> cov, std::span<const double> y) {
  const double c0 = cov[0];
  double peak = 0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  if (!(c0 > 1e-28 * peak * peak)) {
    throw NumericError("autocorrelation: series has zero variance");
  }
  AcfResult a;
  a.T = y.size();
  const double inv_t = 1.0 / static_cast<double>(a.T);
  a.se_white = std::sqrt(inv_t);
  a.r.resize(a.T);
  a.se_bartlett.resize(a.T);
  a.r[0] = 1.0;
  for (std::size_t i = 1; i < a.T; ++i) a.r[i] = cov[i] / c0;
  double sum_sq = 0;
  a.se_bartlett[0] = a.se_white;
  for (std::size_t i = 1; i < a.T; ++i) {
    a.se_bartlett[i] = std::sqrt(inv_t * (1.0 + 2.0 * sum_sq));
    sum_sq += a.r[i] * a.r[i];
  }
  return a;
}

}  // namespace detail

/// Autocorrelation at every lag 0..T-1 by direct summation, O(T^2).
inline AcfResult autocorrelation(std::span<const double> y) {
  detail::require_length(y, 2, "autocorrelation");
  const auto d = detail::demeaned(y);
  const std::size_t T = d.size();
  std::vector<double> cov(T);
  for (std::size_t lag = 0; lag < T; ++lag) {
    double s = 0;
    for (std::size_t t = 0; t + lag < T; ++t) s += d[t] * d[t + lag];
    cov[lag] = s / static_cast<double>(T);
  }
  return detail::finish_acf(std::move(cov), y);
}

/// Same result as `autocorrelation`, via zero-padded FFT convolution, O(T log T).
inline AcfResult autocorrelation_fft(std::span<const double> y) {
  detail::require_length(y, 2, "autocorrelation");
  const std::size_t T = y.size();
  std::size_t m = 1;
  while (m < 2 * T) m <<= 1;
  auto padded = detail::demeaned(y);
  padded.resize(m, 0.0);
  auto spec = fft::forward_real(padded);
  for (auto& c : spec) c = std::norm(c);
  const auto circ = fft::inverse_real(spec, m);
  std::vector<double> cov(T);
  for (std::size_t lag = 0; lag < T; ++lag) {
    cov[lag] = circ[lag] / static_cast<double>(m) / static_cast<double>(T);
  }
  return detail::finish_acf(std::move(cov), y);
}

struct Whiteness {
  double fraction_inside = 0;
  bool verdict = false;
};

/// Fraction of lags 1..T-1 whose |r| stays within multiplier * sqrt(1/T).
/// The series is called white when at least 95% of lags are inside.
inline Whiteness whiteness_check(const AcfResult& acf, double confidence_multiplier = 1.96) {
  if (acf.r.size() < 2) return {1.0, true};
  const double band = confidence_multiplier * acf.se_white;
  std::size_t inside = 0;
  for (std::size_t i = 1; i < acf.r.size(); ++i) {
    if (std::abs(acf.r[i]) <= band) ++inside;
  }
  Whiteness w;
  w.fraction_inside = static_cast<double>(inside) / static_cast<double>(acf.r.size() - 1);
  w.verdict = w.fraction_inside >= 0.95;
  return w;
}

struct Spectrum {
  std::vector<double> freqs;  // cycles per sample (per year for annual series)
  std::vector<double> power;  // |DFT_k|^2 / T, one-sided, k = 0..T/2
  std::size_t T = 0;
};

/// Mean-removed, untapered periodogram without zero padding.
inline Spectrum periodogram(std::span<const double> y) {
  detail::require_length(y, 4, "periodogram");
  const auto d = detail::demeaned(y);
  const auto bins = fft::forward_real(d);
  Spectrum s;
  s.T = y.size();
  const double T = static_cast<double>(s.T);
  s.freqs.resize(bins.size());
  s.power.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    s.freqs[k] = static_cast<double>(k) / T;
    s.power[k] = std::norm(bins[k]) / T;
  }
  return s;
}

/// Sum of the periodogram over all T bins of the two-sided spectrum; equals
/// T times the biased variance (Parseval).
inline double two_sided_power_sum(const Spectrum& s) {
  double total = s.power.empty() ? 0.0 : s.power[0];
  const std::size_t half = s.T / 2;
  for (std::size_t k = 1; k < s.power.size(); ++k) {
    total += (s.T % 2 == 0 && k == half) ? s.power[k] : 2.0 * s.power[k];
  }
  return total;
}

struct SpectralPeak {
  double freq = 0;
  double power = 0;
  double dominance = 0;  // power relative to the mean non-DC bin power
};

/// The `count` strongest non-DC bins, strongest first.
inline std::vector<SpectralPeak> spectrum_peaks(const Spectrum& s, std::size_t count = 5) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k < s.power.size(); ++k) idx.push_back(k);
  if (idx.empty()) return {};
  double mean = 0;
  for (auto k : idx) mean += s.power[k];
  mean /= static_cast<double>(idx.size());
  const auto n = std::min(count, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return s.power[a] != s.power[b] ? s.power[a] > s.power[b] : a < b;
                    });
  std::vector<SpectralPeak> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = idx[i];
    peaks.push_back({s.freqs[k], s.power[k], mean > 0 ? s.power[k] / mean : 0.0});
  }
  return peaks;
}

inline void write_acf(std::ostream& out, const AcfResult& a) {
  out << "lag,r,se_bartlett,se_white\n";
  for (std::size_t i = 0; i < a.r.size(); ++i) {
    out << i << ',' << csv::format_double(a.r[i]) << ',' << csv::format_double(a.se_bartlett[i]) << ','
        << csv::format_double(a.se_white) << '\n';
  }
}

inline void write_spectrum(std::ostream& out, const Spectrum& s) {
  out << "freq_cycles_per_year,power\n";
  for (std::size_t k = 0; k < s.power.size(); ++k) {
    out << csv::format_double(s.freqs[k]) << ',' << csv::format_double(s.power[k]) << '\n';
  }
}

}  // namespace warstats
