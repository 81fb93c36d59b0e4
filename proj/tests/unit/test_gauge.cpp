#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nqg/decoherence.hpp"
#include "nqg/error.hpp"
#include "nqg/gauge.hpp"
#include "support.hpp"

using namespace nqg;
using testing::max_abs_difference;

namespace {

double max_abs(const std::array<double, 4>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

const SpacetimePoint kPointAtTen{0.0, 10.0 / 3.0, 20.0 / 3.0, 20.0 / 3.0};

/// Moving packet that passes two weak sources; used for the gauge witness.
ScenarioConfig witness_config() {
  ScenarioConfig c;
  c.grid = {1, 2048, 64.0};
  c.packet.center = {-10, 0, 0};
  c.packet.momentum = {5, 0, 0};
  c.sources.left = {-1, 0, 0};
  c.sources.right = {1, 0, 0};
  c.sources.mass = 10.0;
  c.sources.softening = 0.5;
  c.times.t_total = 4.0;
  c.times.dt = 1e-3;
  return c;
}

}  // namespace

TEST_CASE("metric families") {
  CHECK(parse_metric_family("schwarzschild_harmonic") == MetricFamily::schwarzschild_harmonic);
  CHECK_THROWS_AS(parse_metric_family("kerr"), InvalidArgument);
  const auto m = MetricField::minkowski().metric(kPointAtTen);
  CHECK(m == Metric4(Eigen::Vector4d(-1, 1, 1, 1).asDiagonal()));

  // g_00 of standard Schwarzschild is -(1 - 2M/r)
  const auto s = MetricField::schwarzschild_standard(1.0).metric(kPointAtTen);
  CHECK(s(0, 0) == doctest::Approx(-0.8));
  CHECK((s - s.transpose()).norm() == 0.0);
  // harmonic radius R = r - M: at R = 10, g_00 = -(R - M)/(R + M)
  const auto h = MetricField::schwarzschild_harmonic(1.0).metric(kPointAtTen);
  CHECK(h(0, 0) == doctest::Approx(-9.0 / 11.0));
  // both charts describe the same geometry: the areal radius sqrt(g_theta theta)
  // equals R + M, so the angular part of the spatial metric is (1 + M/R)^2
  CHECK(h(1, 1) + h(2, 2) + h(3, 3) ==
        doctest::Approx(2 * std::pow(1.1, 2) + 11.0 / 9.0));
}

TEST_CASE("metric domains") {
  const auto s = MetricField::schwarzschild_standard(1.0);
  CHECK_FALSE(s.in_domain({0, 2.0, 0, 0}));
  CHECK_THROWS_AS(s.metric({0, 1.5, 0, 0}), InvalidArgument);
  const auto h = MetricField::schwarzschild_harmonic(1.0);
  CHECK_FALSE(h.in_domain({0, 1.0, 0, 0}));  // R = M is the horizon
  CHECK(h.in_domain({0, 1.01, 0, 0}));
  CHECK_THROWS_AS(harmonic_residual(h, {0, 1.0005, 0, 0}, 1e-3), InvalidArgument);
}

TEST_CASE("minkowski residual vanishes") {
  for (const SpacetimePoint& p : {SpacetimePoint{0, 0, 0, 0}, kPointAtTen}) {
    CHECK(max_abs(harmonic_residual(MetricField::minkowski(), p, 1e-3)) <= 1e-12);
  }
}

TEST_CASE("harmonic Schwarzschild residual is second-order truncation") {
  const auto h = MetricField::schwarzschild_harmonic(1.0);
  const double coarse = max_abs(harmonic_residual(h, kPointAtTen, 1e-3));
  const double fine = max_abs(harmonic_residual(h, kPointAtTen, 5e-4));
  MESSAGE("residual " << coarse << " -> " << fine);
  CHECK(coarse < 1e-6);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
}

TEST_CASE("standard Schwarzschild coordinates are not harmonic") {
  const auto s = MetricField::schwarzschild_standard(1.0);
  CHECK(max_abs(harmonic_residual(s, kPointAtTen, 1e-3)) > 1e-3);
}

TEST_CASE("residual is linear in the weak field") {
  const SpacetimePoint p{0.3, 1.5, -0.5, 0.25};
  auto field = [](double mass) {
    WeakFieldPotential phi{mass, {0.2, 0, 0}, {0.05, -0.02, 0}, 0.5};
    return MetricField::weak_field(phi, true);
  };
  const auto r0 = harmonic_residual(field(0.0), p, 1e-3);
  const auto r1 = harmonic_residual(field(1e-3), p, 1e-3);
  const auto r2 = harmonic_residual(field(2e-3), p, 1e-3);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(r2[i] - 2 * r1[i] + r0[i]) < 1e-10);
  // a static source satisfies the linearized condition up to truncation
  WeakFieldPotential still{1e-3, {0, 0, 0}, {0, 0, 0}, 0.5};
  CHECK(max_abs(harmonic_residual(MetricField::weak_field(still, true), p, 1e-3)) < 1e-9);
}

TEST_CASE("residual csv") {
  std::ostringstream out;
  const std::vector<ResidualSample> rows{{{0, 1, 2, 2}, {0.5, 0, -1e-3, 0}}};
  write_residual_csv(out, rows);
  CHECK(out.str() == "t,x,y,z,r0,r1,r2,r3\n0,1,2,2,0.5,0,-0.001,0\n");
}

TEST_CASE("identity prescription leaves the pair unchanged") {
  auto c = testing::regression_config();
  c.grid.n = 512;
  const auto pair = evolve_branches(c);
  const auto out = realign(pair, GaugePrescription::identity(1));
  CHECK(max_abs_difference(out.left(), pair.left()) == 0.0);
  CHECK(max_abs_difference(out.right(), pair.right()) == 0.0);
  const std::vector<GaugePrescription> only{GaugePrescription::identity(1)};
  const auto rows = compare_gauges(c, only);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].rho_trans == run_double_slit(c).rho_trans);
}

TEST_CASE("realign undoes deform") {
  auto c = testing::regression_config();
  c.grid.n = 2048;
  const auto pair = evolve_branches(c, 2);
  const GaugePrescription p{"asym", HoleDiffeomorphism(1, {-1, 0, 0}, 5.0, {0.8, 0, 0}),
                            HoleDiffeomorphism(1, {1.5, 0, 0}, 4.0, {-0.5, 0, 0}), 0.0};
  const auto deformed = deform(pair, p);
  const auto back = realign(deformed, p);
  CHECK(max_abs_difference(back.left(), pair.left()) < 1e-7);
  CHECK(max_abs_difference(back.right(), pair.right()) < 1e-7);
}

TEST_CASE("disjoint deformations are undone by realignment") {
  ScenarioConfig c;
  c.grid = {1, 4096, 80.0};
  c.sources.mass = 50.0;
  c.times.t_total = 1.0;
  c.times.dt = 2.5e-4;
  const auto pair = evolve_branches(c);
  const double original = transition_probability(pair).rho_trans;
  const auto d = disjoint_deformation_pair({{0, 0, 0}, gaussian_support_radius(1.0)},
                                           pair.grid());
  const GaugePrescription right_way{"disjoint", d.first, d.second, 0.0};
  const auto deformed = deform(pair, right_way);
  const double separated = transition_probability(deformed, kTransformedNormTolerance).rho_trans;
  CHECK(std::abs(separated - 0.5) < 1e-6);
  CHECK(std::abs(separated - original) > 1e-2);
  const auto restored = realign(deformed, right_way);
  CHECK(std::abs(transition_probability(restored, kTransformedNormTolerance).rho_trans -
                 original) < 1e-6);

  const GaugePrescription wrong_way{"swapped", d.second, d.first, 0.0};
  CHECK_THROWS_AS(realign(deformed, wrong_way), PrescriptionMismatch);
}

TEST_CASE("prescriptions differing by a common deformation agree") {
  auto c = testing::regression_config();
  c.grid.n = 2048;
  const auto pair = evolve_branches(c, 2);
  const HoleDiffeomorphism extra(1, {0.5, 0, 0}, 4.0, {1.0, 0, 0});
  const std::vector<GaugePrescription> ps{GaugePrescription::identity(1),
                                          {"common", extra, extra, 0.0}};
  const auto rows = compare_gauges(pair, ps, 2);
  CHECK(std::abs(rows[0].rho_trans - rows[1].rho_trans) < 1e-6);
}

TEST_CASE("a relative deformation where the branches differ changes rho_trans") {
  const auto c = witness_config();
  const HoleDiffeomorphism there(1, {10, 0, 0}, 6.0, {0.5, 0, 0});
  const std::vector<GaugePrescription> ps{
      GaugePrescription::identity(1),
      {"common", there, there, 0.0},
      {"witness", HoleDiffeomorphism::identity(1), there, 0.0}};
  const auto rows = compare_gauges(c, ps, 3);
  MESSAGE("identity " << rows[0].rho_trans << " witness " << rows[2].rho_trans);
  CHECK(std::abs(rows[0].rho_trans - rows[1].rho_trans) < 1e-6);
  CHECK(std::abs(rows[2].rho_trans - rows[0].rho_trans) > 1e-2);
  CHECK(std::abs(rows[0].rho_trans - testing::kWitnessIdentityRho) < 1e-9);
  CHECK(std::abs(rows[2].rho_trans - testing::kWitnessRho) < 1e-9);
}
