#pragma once

#include <fftw3.h>

#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace warstats::fft {

namespace detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FreeDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using Buffer = std::unique_ptr<T[], FreeDeleter>;

template <class T>
Buffer<T> allocate(std::size_t n) {
  return Buffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

}  // namespace detail

/// Unnormalized forward DFT of a real sequence, bins 0..n/2.
inline std::vector<std::complex<double>> forward_real(std::span<const double> in) {
  const std::size_t n = in.size();
  auto src = detail::allocate<double>(n);
  auto dst = detail::allocate<fftw_complex>(n / 2 + 1);
  detail::Plan plan;
  {
    // ESTIMATE never times candidate algorithms, so results are reproducible.
    std::lock_guard lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), src.get(), dst.get(), FFTW_ESTIMATE));
  }
  std::copy(in.begin(), in.end(), src.get());
  fftw_execute(plan.get());
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {dst[k][0], dst[k][1]};
  return out;
}

/// Unnormalized inverse DFT producing a real sequence of length n from bins 0..n/2.
inline std::vector<double> inverse_real(std::span<const std::complex<double>> in, std::size_t n) {
  auto src = detail::allocate<fftw_complex>(n / 2 + 1);
  auto dst = detail::allocate<double>(n);
  detail::Plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), src.get(), dst.get(), FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k < n / 2 + 1; ++k) {
    src[k][0] = in[k].real();
    src[k][1] = in[k].imag();
  }
  fftw_execute(plan.get());
  return std::vector<double>(dst.get(), dst.get() + n);
}

}  // namespace warstats::fft
