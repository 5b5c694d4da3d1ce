#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "warstats/synth.hpp"
#include "warstats/timefreq.hpp"

using namespace warstats;

namespace {

// Biased autocovariance as a literal double loop, 1-based indices.
double naive_autocovariance(const std::vector<double>& y, std::size_t lag) {
  const std::size_t T = y.size();
  double mean = 0;
  for (std::size_t t = 1; t <= T; ++t) mean += y[t - 1];
  mean /= static_cast<double>(T);
  double s = 0;
  for (std::size_t t = 1; t <= T - lag; ++t) s += (y[t - 1] - mean) * (y[t + lag - 1] - mean);
  return s / static_cast<double>(T);
}

// Textbook O(T^2) DFT of the mean-removed series.
std::vector<double> naive_periodogram(const std::vector<double>& y) {
  const std::size_t T = y.size();
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(T);
  std::vector<double> power;
  for (std::size_t k = 0; k <= T / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < T; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(T);
      acc += (y[t] - mean) * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    power.push_back(std::norm(acc) / static_cast<double>(T));
  }
  return power;
}

std::vector<double> random_series(std::mt19937_64& gen, std::size_t T) {
  std::normal_distribution<double> d(3.0, 2.0);
  std::vector<double> y(T);
  for (auto& v : y) v = d(gen);
  return y;
}

}  // namespace

TEST(Autocovariance, LagZeroIsBiasedVariance) {
  const std::vector<double> y = {1, 2, 3};
  EXPECT_DOUBLE_EQ(autocovariance(y, 0), 2.0 / 3.0);
}

TEST(Autocovariance, DividesByTAtEveryLag) {
  const std::vector<double> y = {1, 2, 3};
  // (1-2)(2-2) + (2-2)(3-2) = 0; (1-2)(3-2) = -1 -> -1/3.
  EXPECT_DOUBLE_EQ(autocovariance(y, 1), 0.0);
  EXPECT_DOUBLE_EQ(autocovariance(y, 2), -1.0 / 3.0);
}

TEST(Autocovariance, LagOutOfRange) {
  const std::vector<double> y = {1, 2, 3};
  EXPECT_THROW(autocovariance(y, 3), RangeError);
  const std::vector<double> one = {1};
  EXPECT_THROW(autocovariance(one, 0), std::invalid_argument);
}

TEST(Autocovariance, MatchesNaiveOracleOnRandomSeries) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto y = random_series(gen, 2 + gen() % 255);
    const auto acf = autocorrelation(y);
    const double c0 = naive_autocovariance(y, 0);
    for (std::size_t lag = 0; lag < y.size(); ++lag) {
      const double oracle = naive_autocovariance(y, lag);
      ASSERT_NEAR(autocovariance(y, lag), oracle, 1e-10);
      ASSERT_NEAR(acf.r[lag], oracle / c0, 1e-10);
    }
  }
}

TEST(Autocorrelation, SpikeSeries) {
  std::vector<double> y(50, 4.0);
  y[20] = 9.0;
  const auto a = autocorrelation(y);
  EXPECT_EQ(a.r[0], 1.0);
  EXPECT_EQ(a.r.size(), 50u);
  for (double r : a.r) EXPECT_LE(std::abs(r), 1 + 1e-9);
}

TEST(Autocorrelation, ZeroVarianceIsDegenerate) {
  const std::vector<double> y(10, 0.1);
  EXPECT_THROW(autocorrelation(y), NumericError);
  EXPECT_THROW(autocorrelation_fft(y), NumericError);
  const std::vector<double> zeros(10, 0.0);
  EXPECT_THROW(autocorrelation(zeros), NumericError);
}

TEST(Autocorrelation, WhiteBandValues) {
  std::mt19937_64 gen(8);
  const auto a601 = autocorrelation_fft(random_series(gen, 601));
  EXPECT_NEAR(a601.se_white, 0.0408, 0.00005);
  EXPECT_EQ(a601.se_bartlett[1], std::sqrt(1.0 / 601));
  const auto a1205 = autocorrelation_fft(random_series(gen, 1205));
  EXPECT_NEAR(a1205.se_white, 0.0288, 0.00005);
}

TEST(Autocorrelation, BartlettBand) {
  std::mt19937_64 gen(9);
  const auto y = random_series(gen, 200);
  const auto a = autocorrelation(y);
  EXPECT_EQ(a.se_bartlett[1], a.se_white);
  double sum = 0;
  for (std::size_t i = 1; i < a.T; ++i) {
    ASSERT_NEAR(a.se_bartlett[i], std::sqrt((1 + 2 * sum) / 200.0), 1e-15);
    sum += a.r[i] * a.r[i];
    if (i > 1) {
      ASSERT_GE(a.se_bartlett[i], a.se_bartlett[i - 1]);
    }
  }
}

TEST(Autocorrelation, ShiftAndScaleInvariant) {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = random_series(gen, 100 + gen() % 100);
    std::vector<double> z(y.size());
    std::transform(y.begin(), y.end(), z.begin(), [](double v) { return 3.7 * v - 12.5; });
    const auto a = autocorrelation(y);
    const auto b = autocorrelation(z);
    for (std::size_t i = 0; i < a.T; ++i) ASSERT_NEAR(a.r[i], b.r[i], 1e-10);
  }
}

TEST(Autocorrelation, FftPathAgreesWithDirect) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto y = random_series(gen, 2 + gen() % 700);
    const auto a = autocorrelation(y);
    const auto b = autocorrelation_fft(y);
    ASSERT_EQ(a.T, b.T);
    for (std::size_t i = 0; i < a.T; ++i) {
      ASSERT_NEAR(a.r[i], b.r[i], 1e-9);
      ASSERT_NEAR(a.se_bartlett[i], b.se_bartlett[i], 1e-9);
    }
  }
}

TEST(Periodogram, CosinePeak) {
  const auto y = synth::gen_sinusoid(600, 50, 1.0, 0.0, {1});
  const auto s = periodogram(y);
  ASSERT_EQ(s.power.size(), 301u);
  const auto peak = static_cast<std::size_t>(std::max_element(s.power.begin(), s.power.end()) - s.power.begin());
  EXPECT_EQ(peak, 12u);
  EXPECT_NEAR(s.freqs[peak], 0.02, 1e-15);
  for (std::size_t k = 0; k < s.power.size(); ++k) {
    if (k != peak) {
      EXPECT_GE(s.power[peak], 100 * s.power[k]);
    }
  }
  // Closed form: a commensurate cosine of amplitude A puts A^2 T / 4 in its bin.
  EXPECT_NEAR(s.power[peak], 600.0 / 4.0, 1e-9);
}

TEST(Periodogram, ConstantSeriesHasNoPower) {
  const std::vector<double> y(64, 5.5);
  const auto s = periodogram(y);
  for (double p : s.power) EXPECT_LT(p, 1e-20);
}

TEST(Periodogram, ShortSeriesRejected) {
  const std::vector<double> y = {1, 2, 3};
  EXPECT_THROW(periodogram(y), std::invalid_argument);
}

TEST(Periodogram, MatchesNaiveDft) {
  std::mt19937_64 gen(13);
  for (std::size_t T : {4u, 5u, 17u, 64u, 601u}) {
    const auto y = random_series(gen, T);
    const auto s = periodogram(y);
    const auto oracle = naive_periodogram(y);
    ASSERT_EQ(s.power.size(), T / 2 + 1);
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      ASSERT_NEAR(s.power[k], oracle[k], 1e-8 * (1 + oracle[k])) << "T=" << T << " k=" << k;
      ASSERT_DOUBLE_EQ(s.freqs[k], static_cast<double>(k) / static_cast<double>(T));
    }
    EXPECT_LT(s.power[0], 1e-20);
  }
}

TEST(Periodogram, Parseval) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto y = random_series(gen, 4 + gen() % 1000);
    const auto s = periodogram(y);
    const double expected = static_cast<double>(y.size()) * autocovariance(y, 0);
    ASSERT_NEAR(two_sided_power_sum(s), expected, 1e-8 * expected);
  }
}

TEST(Periodogram, WhiteNoiseHasNoDominantBin) {
  int quiet = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = periodogram(synth::gen_white_noise(601, {seed}));
    double mean = 0;
    for (std::size_t k = 1; k < s.power.size(); ++k) mean += s.power[k];
    mean /= static_cast<double>(s.power.size() - 1);
    const double top = *std::max_element(s.power.begin() + 1, s.power.end());
    quiet += top <= 10 * mean ? 1 : 0;
  }
  EXPECT_GE(quiet, 95);
}

TEST(SpectrumPeaks, StrongestFirst) {
  const auto s = periodogram(synth::gen_sinusoid(600, 50, 1.0, 0.1, {3}));
  const auto peaks = spectrum_peaks(s, 3);
  ASSERT_EQ(peaks.size(), 3u);
  EXPECT_NEAR(peaks[0].freq, 0.02, 1e-15);
  EXPECT_GE(peaks[0].power, peaks[1].power);
  EXPECT_GE(peaks[1].power, peaks[2].power);
  EXPECT_GT(peaks[0].dominance, 100);
}

TEST(Whiteness, ZeroCorrelationIsWhite) {
  AcfResult a;
  a.T = 100;
  a.se_white = 0.1;
  a.r.assign(100, 0.0);
  a.r[0] = 1;
  const auto w = whiteness_check(a);
  EXPECT_EQ(w.fraction_inside, 1.0);
  EXPECT_TRUE(w.verdict);
}

TEST(Whiteness, CosineIsNotWhite) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto y = synth::gen_sinusoid(601, 50, 1.0, 0.0, {seed});
    ASSERT_FALSE(whiteness_check(autocorrelation_fft(y)).verdict);
  }
}

TEST(Whiteness, WhiteNoiseMostlyInsideBand) {
  std::vector<double> fractions;
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto w = whiteness_check(autocorrelation_fft(synth::gen_white_noise(601, {seed})));
    fractions.push_back(w.fraction_inside);
    passes += w.verdict ? 1 : 0;
  }
  std::nth_element(fractions.begin(), fractions.begin() + 50, fractions.end());
  EXPECT_GE(fractions[50], 0.90);
  EXPECT_GE(passes, 90);
}

TEST(Export, AcfAndSpectrumCsvHeaders) {
  const std::vector<double> y = {1, 3, 2, 5, 4, 6};
  std::ostringstream a, s;
  write_acf(a, autocorrelation(y));
  write_spectrum(s, periodogram(y));
  const auto acf_csv = a.str();
  const auto spec_csv = s.str();
  EXPECT_EQ(acf_csv.substr(0, acf_csv.find('\n')), "lag,r,se_bartlett,se_white");
  EXPECT_EQ(spec_csv.substr(0, spec_csv.find('\n')), "freq_cycles_per_year,power");
  EXPECT_EQ(std::count(acf_csv.begin(), acf_csv.end(), '\n'), 7);
  EXPECT_EQ(std::count(spec_csv.begin(), spec_csv.end(), '\n'), 5);
}
