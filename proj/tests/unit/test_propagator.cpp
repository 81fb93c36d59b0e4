#include <cmath>
#include <vector>

#include "doctest.h"
#include "nqg/error.hpp"
#include "nqg/potential.hpp"
#include "nqg/propagator.hpp"
#include "support.hpp"

using namespace nqg;
using testing::max_abs_difference;

namespace {

PotentialField regression_potential(const Grid& g, double x) {
  const std::vector<NewtonianSource> s{{{x, 0, 0}, 50.0, 0.5}};
  return sample_potential(g, s, 1.0);
}

}  // namespace

TEST_CASE("default time step") {
  const Grid g(1, 1024, 40.0);
  CHECK(default_time_step(g, 2.0) == doctest::Approx(0.2 * g.spacing() * g.spacing()));
}

TEST_CASE("free Gaussian dispersion") {
  const Grid g(1, 4096, 80.0);
  const double s0 = 1.0, m = 1.0, t = 2.0;
  const auto psi = evolve(gaussian_packet(g, {0, 0, 0}, s0, {0, 0, 0}), zero_potential(g), t,
                          1e-3, m);
  const double expected = s0 * std::sqrt(1.0 + t * t / (4.0 * m * m * s0 * s0 * s0 * s0));
  CHECK(std::abs(position_spread(psi, 0) / expected - 1.0) < 1e-8);
}

TEST_CASE("norm is preserved") {
  const Grid g(2, 128, 32.0);
  const std::vector<NewtonianSource> s{{{1, 0, 0}, 5.0, 0.5}, {{-1, 1, 0}, 3.0, 0.5}};
  const auto v = sample_potential(g, s, 1.0);
  const auto psi = evolve(gaussian_packet(g, {0, 0, 0}, 1.2, {1, -1, 0}), v, 0.5, 1e-3, 1.0);
  CHECK(std::abs(norm(psi) - 1.0) < 1e-12);
}

TEST_CASE("constant potential only adds a global phase") {
  const Grid g(1, 512, 40.0);
  const double c = 0.75, t = 1.3;
  const auto psi0 = gaussian_packet(g, {1, 0, 0}, 1.0, {0.5, 0, 0});
  const auto free = evolve(psi0, zero_potential(g), t, 1e-2, 1.0);
  const auto shifted =
      evolve(psi0, PotentialField(g, std::vector<double>(g.size(), c)), t, 1e-2, 1.0);
  CHECK(max_abs_difference(shifted, free.scaled(std::polar(1.0, -c * t))) < 1e-12);
}

TEST_CASE("zero time returns the input") {
  const Grid g(1, 256, 20.0);
  const auto psi0 = gaussian_packet(g, {0, 0, 0}, 1.0, {0, 0, 0});
  const auto psi = evolve(psi0, regression_potential(g, 2.0), 0.0, 1e-3, 1.0);
  for (std::size_t i = 0; i < psi.size(); ++i) CHECK(psi[i] == psi0[i]);
}

TEST_CASE("bad arguments") {
  const Grid g(1, 256, 20.0);
  const auto psi0 = gaussian_packet(g, {0, 0, 0}, 1.0, {0, 0, 0});
  const auto v = zero_potential(g);
  CHECK_THROWS_AS(evolve(psi0, v, 1.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(evolve(psi0, v, 1.0, -1e-3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(evolve(psi0, v, -1.0, 1e-3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(evolve(psi0, v, 1.0, 1e-3, 0.0), InvalidArgument);
  CHECK_THROWS_AS(evolve(psi0, v, 2e3, 1e-3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(evolve(psi0, zero_potential(Grid(1, 128, 20.0)), 1.0, 1e-3, 1.0),
                  GridMismatch);
}

TEST_CASE("accuracy guard") {
  const Grid g(1, 256, 20.0);
  const auto v = regression_potential(g, 0.0);  // max |V| = 100
  CHECK_FALSE(exceeds_accuracy_guard(v, 1e-2));
  CHECK(exceeds_accuracy_guard(v, 2e-2));
}

TEST_CASE("the last step is shortened to land on t_total") {
  const Grid g(1, 512, 40.0);
  const auto psi0 = gaussian_packet(g, {0, 0, 0}, 1.0, {0, 0, 0});
  const auto v = regression_potential(g, 2.0);
  // 0.0105 = 10 steps of 1e-3 plus one of 5e-4
  const auto a = evolve(psi0, v, 0.0105, 1e-3, 1.0);
  const auto b = step(evolve(psi0, v, 0.010, 1e-3, 1.0), v, 5e-4, 1.0);
  CHECK(max_abs_difference(a, b) < 1e-13);
}

TEST_CASE("semigroup property") {
  const Grid g(1, 1024, 40.0);
  const auto psi0 = gaussian_packet(g, {0, 0, 0}, 1.0, {0, 0, 0});
  const auto v = regression_potential(g, 2.0);
  const double dt = 1e-3;
  const auto whole = evolve(psi0, v, 0.5, dt, 1.0);
  const auto split = evolve(evolve(psi0, v, 0.2, dt, 1.0), v, 0.3, dt, 1.0);
  CHECK(max_abs_difference(whole, split) < 1e-10);
}

TEST_CASE("time reversal by conjugate stepping") {
  const Grid g(1, 1024, 40.0);
  const auto psi0 = gaussian_packet(g, {0.5, 0, 0}, 1.0, {1.0, 0, 0});
  const auto v = regression_potential(g, -2.0);
  const auto forward = evolve(psi0, v, 1.0, 1e-3, 1.0);
  const auto back = evolve(forward.conjugated(), v, 1.0, 1e-3, 1.0).conjugated();
  CHECK(max_abs_difference(back, psi0) < 1e-10);
}

TEST_CASE("norm drift over 1e4 steps") {
  const Grid g(1, 1024, 40.0);
  const auto psi0 = gaussian_packet(g, {0, 0, 0}, 1.0, {0, 0, 0});
  const auto psi = evolve(psi0, regression_potential(g, 2.0), 1.0, 1e-4, 1.0);
  CHECK(std::abs(norm(psi) - 1.0) < 1e-9);
}

TEST_CASE("second order in dt") {
  const Grid g(1, 256, 40.0);
  const auto psi0 = gaussian_packet(g, {0, 0, 0}, 1.0, {0, 0, 0});
  const auto v = regression_potential(g, 2.0);
  const double t = 0.5, dt = 4e-3;
  const auto reference = evolve(psi0, v, t, dt / 8.0, 1.0);
  auto error = [&](double step_size) {
    const auto psi = evolve(psi0, v, t, step_size, 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) sum += std::norm(psi[i] - reference[i]);
    return std::sqrt(sum * g.cell_volume());
  };
  const double ratio = error(dt) / error(dt / 2.0);
  MESSAGE("dt halving error ratio " << ratio);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("harmonic oscillator follows the classical orbit") {
  const Grid g(1, 512, 40.0);
  const double m = 1.0, w = 1.0, x0 = 2.0;
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coordinate(i);
    values[i] = 0.5 * m * w * w * x * x;
  }
  const PotentialField v(g, values);
  const double period = 2.0 * M_PI / w;
  auto psi = gaussian_packet(g, {x0, 0, 0}, 1.0 / std::sqrt(2.0 * m * w), {0, 0, 0});
  const int segments = 8;
  for (int k = 1; k <= segments; ++k) {
    psi = evolve(psi, v, period / segments, 1e-3, m);
    const double t = k * period / segments;
    CHECK(std::abs(position_expectation(psi)[0] - x0 * std::cos(w * t)) < 1e-4);
  }
}
