#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace warstats::synth {

struct Seed {
  std::uint64_t value = 0;
};

/// Reproducible random stream. The engine is MT19937-64, whose output
/// sequence is fixed by the C++ standard; the transforms below are written
/// out rather than taken from <random> distributions, whose algorithms vary
/// between standard libraries.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  /// Uniform on (0, 1]: (top 53 bits + 1) * 2^-53.
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal by the Box-Muller transform; values come in pairs.
  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Inverse-transform samples from a density proportional to x^alpha on
/// [x_min, inf), alpha < -1. The CCDF of the result falls as x^(alpha+1).
inline std::vector<double> gen_power_law(std::size_t n, double alpha, double x_min, Seed seed) {
  if (n < 1) throw std::invalid_argument("gen_power_law: n must be >= 1");
  if (!(alpha < -1)) throw std::invalid_argument("gen_power_law: density exponent must be < -1");
  if (!(x_min > 0)) throw std::invalid_argument("gen_power_law: x_min must be positive");
  Rng rng(seed);
  const double inv = 1.0 / (alpha + 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = x_min * std::pow(rng.uniform(), inv);
  return out;
}

inline std::vector<double> gen_lognormal(std::size_t n, double mu, double sigma, Seed seed) {
  if (n < 1) throw std::invalid_argument("gen_lognormal: n must be >= 1");
  if (!(sigma > 0)) throw std::invalid_argument("gen_lognormal: sigma must be positive");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = std::exp(mu + sigma * rng.normal());
  return out;
}

inline std::vector<double> gen_white_noise(std::size_t T, Seed seed) {
  if (T < 4) throw std::invalid_argument("gen_white_noise: T must be >= 4");
  Rng rng(seed);
  std::vector<double> out(T);
  for (auto& x : out) x = rng.normal();
  return out;
}

/// amplitude * cos(2*pi*t/period) + noise_sd * N(0,1), t = 0..T-1.
inline std::vector<double> gen_sinusoid(std::size_t T, double period, double amplitude, double noise_sd,
                                        Seed seed) {
  if (T < 4) throw std::invalid_argument("gen_sinusoid: T must be >= 4");
  if (!(period >= 2)) throw std::invalid_argument("gen_sinusoid: period must be >= 2");
  if (!(noise_sd >= 0)) throw std::invalid_argument("gen_sinusoid: noise_sd must be >= 0");
  Rng rng(seed);
  std::vector<double> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double noise = noise_sd > 0 ? noise_sd * rng.normal() : 0.0;
    out[t] = amplitude * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / period) + noise;
  }
  return out;
}

}  // namespace warstats::synth
