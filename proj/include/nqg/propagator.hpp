#pragma once

#include <memory>
#include <vector>

#include "nqg/lattice.hpp"
#include "nqg/potential.hpp"

namespace nqg {

/// 0.1 * mass * spacing^2, the default time step of a scenario.
double default_time_step(const Grid& grid, double mass);

/// True when dt * max|V| exceeds one, i.e. the potential phase per step is
/// no longer small.
bool exceeds_accuracy_guard(const PotentialField& potential, double dt);

/// One Strang step exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2) with the kinetic
/// factor T = |k|^2 / (2 mass) applied in Fourier space, k = 2 pi j / length,
/// j in [-n/2, n/2).
///
/// Phase factors are precomputed once; apply() is const and may be called
/// concurrently on different buffers.
class SplitOperatorStep {
 public:
  SplitOperatorStep(const PotentialField& potential, double dt, double mass);
  ~SplitOperatorStep();
  SplitOperatorStep(SplitOperatorStep&&) noexcept;
  SplitOperatorStep& operator=(SplitOperatorStep&&) noexcept;

  void apply(std::vector<Complex>& psi) const;

  double dt() const { return dt_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double dt_;
};

WaveFunction step(const WaveFunction& psi, const PotentialField& potential, double dt,
                  double mass);

/// ceil(t_total / dt) steps of size dt, the last one shortened so the
/// evolution lands exactly on t_total. t_total == 0 returns the input.
WaveFunction evolve(const WaveFunction& psi0, const PotentialField& potential,
                    double t_total, double dt, double mass);

inline constexpr double kMaxSteps = 1e6;

}  // namespace nqg
