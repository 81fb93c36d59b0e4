#include "nqg/propagator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <spdlog/spdlog.h>

#include "fft.hpp"
#include "nqg/error.hpp"

namespace nqg {

double default_time_step(const Grid& grid, double mass) {
  return 0.1 * mass * grid.spacing() * grid.spacing();
}

bool exceeds_accuracy_guard(const PotentialField& potential, double dt) {
  return dt * potential.max_abs() > 1.0;
}

struct SplitOperatorStep::Impl {
  Grid grid;
  detail::FftPlan plan;
  std::vector<Complex> half_potential;  // exp(-i V dt / 2), empty when V == 0
  std::vector<Complex> kinetic;         // exp(-i |k|^2 dt / (2m)) / size

  Impl(const PotentialField& v, double dt, double mass)
      : grid(v.grid()), plan(grid.dim(), grid.n()) {
    if (!v.is_zero()) {
      half_potential.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        half_potential[i] = std::polar(1.0, -0.5 * v[i] * dt);
      }
    }
    const double dk = 2.0 * std::numbers::pi / grid.length();
    const double scale = 1.0 / static_cast<double>(grid.size());
    kinetic.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unflatten(i);
      double k2 = 0.0;
      for (int d = 0; d < grid.dim(); ++d) {
        const double k = dk * static_cast<double>(detail::signed_frequency(idx[d], grid.n()));
        k2 += k * k;
      }
      kinetic[i] = std::polar(scale, -0.5 * k2 * dt / mass);
    }
  }
};

SplitOperatorStep::SplitOperatorStep(const PotentialField& potential, double dt, double mass)
    : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("times.dt must be positive");
  if (!(mass > 0.0)) throw InvalidArgument("masses.m must be positive");
  if (exceeds_accuracy_guard(potential, dt)) {
    spdlog::warn("dt * max|V| = {:.3g} > 1: potential phase per step is not small",
                 dt * potential.max_abs());
  }
  impl_ = std::make_unique<Impl>(potential, dt, mass);
}

SplitOperatorStep::~SplitOperatorStep() = default;
SplitOperatorStep::SplitOperatorStep(SplitOperatorStep&&) noexcept = default;
SplitOperatorStep& SplitOperatorStep::operator=(SplitOperatorStep&&) noexcept = default;

void SplitOperatorStep::apply(std::vector<Complex>& psi) const {
  const auto& hp = impl_->half_potential;
  const auto& kin = impl_->kinetic;
  if (!hp.empty()) {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= hp[i];
  }
  impl_->plan.forward(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kin[i];
  impl_->plan.backward(psi);
  if (!hp.empty()) {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= hp[i];
  }
}

namespace {

void require_same_grid(const WaveFunction& psi, const PotentialField& v) {
  if (!(psi.grid() == v.grid())) {
    throw GridMismatch("wave function and potential live on different lattices");
  }
}

}  // namespace

WaveFunction step(const WaveFunction& psi, const PotentialField& potential, double dt,
                  double mass) {
  require_same_grid(psi, potential);
  SplitOperatorStep stepper(potential, dt, mass);
  std::vector<Complex> data(psi.amplitudes().begin(), psi.amplitudes().end());
  stepper.apply(data);
  return WaveFunction(psi.grid(), std::move(data));
}

WaveFunction evolve(const WaveFunction& psi0, const PotentialField& potential, double t_total,
                    double dt, double mass) {
  require_same_grid(psi0, potential);
  if (!(t_total >= 0.0) || !std::isfinite(t_total)) {
    throw InvalidArgument("times.t_total must be finite and non-negative");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("times.dt must be positive");
  if (t_total == 0.0) return psi0;

  // Count full steps with a relative slack so that t_total = k * dt in
  // floating point does not produce a spurious sliver step.
  const double ratio = t_total / dt;
  if (ratio > kMaxSteps) {
    std::ostringstream msg;
    msg << "t_total / dt = " << ratio << " exceeds the limit of " << kMaxSteps << " steps";
    throw InvalidArgument(msg.str());
  }
  auto full = static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
  double remainder = t_total - static_cast<double>(full) * dt;
  if (remainder <= 1e-12 * t_total) remainder = 0.0;

  std::vector<Complex> data(psi0.amplitudes().begin(), psi0.amplitudes().end());
  if (full > 0) {
    SplitOperatorStep stepper(potential, dt, mass);
    for (std::size_t s = 0; s < full; ++s) stepper.apply(data);
  }
  if (remainder > 0.0) {
    SplitOperatorStep last(potential, remainder, mass);
    last.apply(data);
  }
  return WaveFunction(psi0.grid(), std::move(data));
}

}  // namespace nqg
