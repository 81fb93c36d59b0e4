#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "nqg/decoherence.hpp"
#include "nqg/diffeo.hpp"
#include "nqg/lattice.hpp"
#include "nqg/scenario.hpp"

namespace testing {

/// Frozen reference values from the dense Crank-Nicolson solver in
/// tests/oracle (step 1e-6) on the regression lattice n = 1024, L = 40.
inline constexpr double kOracleRhoM50 = 0.42194263809779708;
inline constexpr double kOracleRhoM10 = 0.62883189745074375;
inline constexpr double kOracleRhoM20 = 0.49326293866902327;

/// Gauge witness: identity and right-branch-only prescriptions on the
/// moving-packet scenario (frozen from the first run).
inline constexpr double kWitnessIdentityRho = 0.0029746387046354905;
inline constexpr double kWitnessRho = 0.71764097627084211;

/// One dimensional double-slit setup used throughout the tests.
inline nqg::ScenarioConfig regression_config() {
  nqg::ScenarioConfig c;
  c.name = "regression";
  c.grid = {1, 1024, 40.0};
  c.packet.center = {0.0, 0.0, 0.0};
  c.packet.width = 1.0;
  c.sources.left = {-2.0, 0.0, 0.0};
  c.sources.right = {2.0, 0.0, 0.0};
  c.sources.mass = 50.0;
  c.sources.softening = 0.5;
  c.test_mass = 1.0;
  c.times.t_total = 2.0;
  c.times.dt = 2.5e-4;
  return c;
}

/// Valid 1D deformation near the origin with Lipschitz bound in [0.1, 0.7].
inline nqg::HoleDiffeomorphism random_deformation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-3.0, 3.0), radius(3.0, 6.0),
      kappa(0.1, 0.7), coin(0.0, 1.0);
  const auto profile = coin(rng) < 0.5 ? nqg::BumpProfile::standard : nqg::BumpProfile::plateau;
  const double r = radius(rng);
  double a = kappa(rng) * r / nqg::bump_max_slope(profile);
  if (coin(rng) < 0.5) a = -a;
  return nqg::HoleDiffeomorphism(1, {center(rng), 0, 0}, r, {a, 0, 0}, profile);
}

inline double max_abs_difference(const nqg::WaveFunction& a, const nqg::WaveFunction& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace testing
