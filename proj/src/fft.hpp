#pragma once

#include <complex>
#include <vector>

#include <fftw3.h>

#include "nqg/lattice.hpp"

namespace nqg::detail {

/// Unnormalized n^dim complex DFT in both directions. Plans are created
/// once (FFTW_ESTIMATE, so results are reproducible) and executed with the
/// new-array interface, which is safe to call concurrently.
class FftPlan {
 public:
  FftPlan(int dim, std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(std::vector<Complex>& data) const;
  void backward(std::vector<Complex>& data) const;

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::size_t size_ = 0;
};

/// Signed wavenumber index j in [-n/2, n/2) for FFT bin b.
inline long long signed_frequency(std::size_t b, std::size_t n) {
  const auto j = static_cast<long long>(b);
  const auto half = static_cast<long long>(n / 2);
  return j < half ? j : j - static_cast<long long>(n);
}

}  // namespace nqg::detail
