#include <cmath>
#include <vector>

#include "doctest.h"
#include "nqg/error.hpp"
#include "nqg/potential.hpp"
#include "nqg/propagator.hpp"
#include "support.hpp"

using namespace nqg;

TEST_CASE("far field is Newtonian") {
  const Grid g(1, 4096, 400.0);
  const std::vector<NewtonianSource> s{{{0, 0, 0}, 3.0, 0.1}};
  const auto v = sample_potential(g, s, 2.0);
  const std::size_t i = 2048 + 1920;  // x = 187.5
  const double r = g.coordinate(i);
  CHECK(std::abs(v[i] - (-6.0 / r)) <= 1e-6 * 6.0 / r);
}

TEST_CASE("softened value at the source") {
  const Grid g(1, 1024, 40.0);
  const std::vector<NewtonianSource> s{{{0, 0, 0}, 1.0, 0.1}};
  const auto v = sample_potential(g, s, 1.0);
  CHECK(std::abs(v[512] - (-10.0)) < 1e-12);
}

TEST_CASE("sources add") {
  const Grid g(2, 32, 8.0);
  const NewtonianSource one{{0.5, -1.0, 0}, 2.0, 0.5};
  const std::vector<NewtonianSource> single{one};
  const std::vector<NewtonianSource> twice{one, one};
  const auto a = sample_potential(g, single, 1.5);
  const auto b = sample_potential(g, twice, 1.5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(b[i] == 2.0 * a[i]);
}

TEST_CASE("zero potential") {
  const Grid g(2, 16, 4.0);
  const auto z = zero_potential(g);
  CHECK(z.is_zero());
  CHECK(z.max_abs() == 0.0);
  const std::vector<NewtonianSource> s{{{0, 0, 0}, 1.0, 0.5}};
  const auto v = sample_potential(g, s, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(v[i] + z[i] == v[i]);
}

TEST_CASE("zero potential evolves like a free packet") {
  const Grid g(1, 1024, 40.0);
  const auto psi0 = gaussian_packet(g, {0, 0, 0}, 1.0, {0, 0, 0});
  const auto psi = evolve(psi0, zero_potential(g), 1.0, 1e-2, 1.0);
  const double expected = std::sqrt(1.0 + 1.0 / 4.0);
  CHECK(std::abs(position_spread(psi, 0) - expected) < 1e-8);
}

TEST_CASE("sampling preconditions") {
  const Grid g(1, 64, 8.0);
  CHECK_THROWS_AS(sample_potential(g, std::vector<NewtonianSource>{}, 1.0), InvalidArgument);
  const std::vector<NewtonianSource> s{{{0, 0, 0}, 1.0, 0.5}};
  CHECK_THROWS_AS(sample_potential(g, s, 0.0), InvalidArgument);
  const std::vector<NewtonianSource> massless{{{0, 0, 0}, 0.0, 0.5}};
  CHECK_THROWS_AS(sample_potential(g, massless, 1.0), InvalidArgument);
  const std::vector<NewtonianSource> sharp{{{0, 0, 0}, 1.0, 0.01}};
  CHECK_THROWS_AS(sample_potential(g, sharp, 1.0), InvalidArgument);
}

TEST_CASE("translation by whole cells permutes the samples exactly") {
  for (int dim = 1; dim <= 2; ++dim) {
    const Grid g(dim, 64, 16.0);
    const double h = g.spacing();
    const NewtonianSource base{{0.5 + h / 4, -0.75, 0}, 1.0, 0.5};
    const std::vector<NewtonianSource> s0{base};
    const auto v0 = sample_potential(g, s0, 1.0);
    for (int k : {1, 5, -7, 40}) {
      NewtonianSource moved = base;
      moved.position[0] += k * h;
      const std::vector<NewtonianSource> s1{moved};
      const auto v1 = sample_potential(g, s1, 1.0);
      const long n = static_cast<long>(g.n());
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto idx = g.unflatten(i);
        idx[0] = static_cast<std::size_t>(((static_cast<long>(idx[0]) + k) % n + n) % n);
        CHECK(v1[g.flatten(idx)] == v0[i]);
      }
    }
  }
}

TEST_CASE("|V| strictly decreases away from an isolated source") {
  const Grid g(1, 1024, 40.0);
  const std::vector<NewtonianSource> s{{{0, 0, 0}, 5.0, 0.5}};
  const auto v = sample_potential(g, s, 1.0);
  for (std::size_t i = 513; i < 1024; ++i) CHECK(std::abs(v[i]) < std::abs(v[i - 1]));
  for (std::size_t i = 511; i > 0; --i) CHECK(std::abs(v[i]) < std::abs(v[i + 1]));
}
