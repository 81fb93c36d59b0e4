#include "fft.hpp"

#include <mutex>

#include "nqg/error.hpp"

namespace nqg::detail {
namespace {

// Planner calls are not thread-safe in FFTW.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftPlan::FftPlan(int dim, std::size_t n) {
  std::array<int, 3> dims{static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
  size_ = 1;
  for (int d = 0; d < dim; ++d) size_ *= n;
  std::vector<Complex> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft(dim, dims.data(), buf, buf, FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft(dim, dims.data(), buf, buf, FFTW_BACKWARD, flags);
  if (!forward_ || !backward_) throw Error("FFTW failed to create a plan");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(forward_);
  if (backward_) fftw_destroy_plan(backward_);
}

void FftPlan::forward(std::vector<Complex>& data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(forward_, buf, buf);
}

void FftPlan::backward(std::vector<Complex>& data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(backward_, buf, buf);
}

}  // namespace nqg::detail
