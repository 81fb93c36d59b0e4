#include "nqg/gauge.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "nqg/error.hpp"
#include "nqg/parallel.hpp"

namespace nqg {

MetricFamily parse_metric_family(std::string_view name) {
  if (name == "minkowski_cartesian") return MetricFamily::minkowski_cartesian;
  if (name == "schwarzschild_standard") return MetricFamily::schwarzschild_standard;
  if (name == "schwarzschild_harmonic") return MetricFamily::schwarzschild_harmonic;
  if (name == "weak_field_newtonian") return MetricFamily::weak_field_newtonian;
  throw InvalidArgument("unknown metric family '" + std::string(name) + "'");
}

std::string_view to_string(MetricFamily family) {
  switch (family) {
    case MetricFamily::minkowski_cartesian: return "minkowski_cartesian";
    case MetricFamily::schwarzschild_standard: return "schwarzschild_standard";
    case MetricFamily::schwarzschild_harmonic: return "schwarzschild_harmonic";
    case MetricFamily::weak_field_newtonian: return "weak_field_newtonian";
  }
  return "?";
}

double WeakFieldPotential::operator()(const SpacetimePoint& p) const {
  double r2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double dx = p[d + 1] - position[d] - velocity[d] * p[0];
    r2 += dx * dx;
  }
  return -mass / std::sqrt(r2 + softening * softening);
}

MetricField MetricField::minkowski() { return MetricField(MetricFamily::minkowski_cartesian, 0.0); }

MetricField MetricField::schwarzschild_standard(double mass) {
  if (!(mass > 0.0)) throw InvalidArgument("metric.mass must be positive");
  return MetricField(MetricFamily::schwarzschild_standard, mass);
}

MetricField MetricField::schwarzschild_harmonic(double mass) {
  if (!(mass > 0.0)) throw InvalidArgument("metric.mass must be positive");
  return MetricField(MetricFamily::schwarzschild_harmonic, mass);
}

MetricField MetricField::weak_field(const WeakFieldPotential& potential, bool linearized) {
  if (!(potential.mass >= 0.0) || !(potential.softening > 0.0)) {
    throw InvalidArgument("weak-field source needs mass >= 0 and softening > 0");
  }
  MetricField m(MetricFamily::weak_field_newtonian, potential.mass);
  m.potential_ = potential;
  m.linearized_ = linearized;
  return m;
}

MetricField make_metric(const MetricSpec& spec) {
  switch (parse_metric_family(spec.family)) {
    case MetricFamily::minkowski_cartesian: return MetricField::minkowski();
    case MetricFamily::schwarzschild_standard: return MetricField::schwarzschild_standard(spec.mass);
    case MetricFamily::schwarzschild_harmonic: return MetricField::schwarzschild_harmonic(spec.mass);
    case MetricFamily::weak_field_newtonian:
      return MetricField::weak_field(
          {spec.mass, spec.source_position, spec.source_velocity, spec.softening}, spec.linearized);
  }
  throw InvalidArgument("unknown metric family");
}

namespace {

double spatial_radius(const SpacetimePoint& p) {
  return std::sqrt(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
}

constexpr double kHorizonMargin = 1e-6;

}  // namespace

bool MetricField::in_domain(const SpacetimePoint& p) const {
  for (double v : p) {
    if (!std::isfinite(v)) return false;
  }
  const double x = spatial_radius(p);
  switch (family_) {
    case MetricFamily::minkowski_cartesian:
      return true;
    case MetricFamily::schwarzschild_standard:
      return x > 2.0 * mass_ * (1.0 + kHorizonMargin);
    case MetricFamily::schwarzschild_harmonic:
      return x + mass_ > 2.0 * mass_ * (1.0 + kHorizonMargin);  // areal r = R + M
    case MetricFamily::weak_field_newtonian:
      return std::abs(potential_(p)) < 0.5;
  }
  return false;
}

Metric4 MetricField::metric(const SpacetimePoint& p) const {
  if (!in_domain(p)) {
    std::ostringstream msg;
    msg << to_string(family_) << " evaluated outside its domain at (" << p[0] << ", " << p[1]
        << ", " << p[2] << ", " << p[3] << ")";
    throw InvalidArgument(msg.str());
  }
  Metric4 g = Metric4::Zero();
  const double r = spatial_radius(p);
  const Eigen::Vector3d n = r > 0.0 ? Eigen::Vector3d(Eigen::Vector3d(p[1], p[2], p[3]) / r)
                                    : Eigen::Vector3d(Eigen::Vector3d::Zero());
  switch (family_) {
    case MetricFamily::minkowski_cartesian:
      g.diagonal() << -1.0, 1.0, 1.0, 1.0;
      break;
    case MetricFamily::schwarzschild_standard: {
      const double m = mass_;
      g(0, 0) = -(1.0 - 2.0 * m / r);
      g.bottomRightCorner<3, 3>() =
          Eigen::Matrix3d::Identity() + (2.0 * m / (r - 2.0 * m)) * n * n.transpose();
      break;
    }
    case MetricFamily::schwarzschild_harmonic: {
      const double m = mass_;
      const double tangential = (1.0 + m / r) * (1.0 + m / r);
      const double radial = (r + m) / (r - m);
      g(0, 0) = -(r - m) / (r + m);
      g.bottomRightCorner<3, 3>() = tangential * Eigen::Matrix3d::Identity() +
                                    (radial - tangential) * n * n.transpose();
      break;
    }
    case MetricFamily::weak_field_newtonian: {
      const double phi = potential_(p);
      g(0, 0) = -(1.0 + 2.0 * phi);
      g.bottomRightCorner<3, 3>() = (1.0 - 2.0 * phi) * Eigen::Matrix3d::Identity();
      break;
    }
  }
  if (!g.allFinite()) throw NumericalError("metric evaluator produced a non-finite value");
  // Symmetric by construction; enforce bitwise symmetry of the off-diagonal.
  g = 0.5 * (g + g.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Metric4> eig(g, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (!(ev(0) < 0.0 && ev(1) > 0.0)) {
    throw NumericalError("metric is not Lorentzian (-,+,+,+) at the evaluation point");
  }
  return g;
}

Metric4 MetricField::density(const SpacetimePoint& p) const {
  if (family_ == MetricFamily::weak_field_newtonian && linearized_) {
    if (!in_domain(p)) throw InvalidArgument("weak-field metric evaluated outside its domain");
    Metric4 d = Metric4::Identity();
    d(0, 0) = -1.0 + 4.0 * potential_(p);
    return d;
  }
  const Metric4 g = metric(p);
  const double det = g.determinant();
  if (!(det < 0.0)) throw NumericalError("metric determinant is not negative");
  return std::sqrt(-det) * g.inverse();
}

std::array<double, 4> harmonic_residual(const MetricField& metric, const SpacetimePoint& point,
                                        double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("finite-difference step must be positive");
  std::array<double, 4> residual{0.0, 0.0, 0.0, 0.0};
  for (int mu = 0; mu < 4; ++mu) {
    SpacetimePoint plus = point;
    SpacetimePoint minus = point;
    plus[mu] += h;
    minus[mu] -= h;
    const Metric4 diff = (metric.density(plus) - metric.density(minus)) / (2.0 * h);
    for (int nu = 0; nu < 4; ++nu) residual[nu] += diff(mu, nu);
  }
  return residual;
}

void write_residual_csv(std::ostream& out, std::span<const ResidualSample> samples) {
  out << "t,x,y,z,r0,r1,r2,r3\n" << std::setprecision(17);
  for (const auto& s : samples) {
    out << s.point[0] << ',' << s.point[1] << ',' << s.point[2] << ',' << s.point[3];
    for (double r : s.residual) out << ',' << r;
    out << '\n';
  }
}

GaugePrescription GaugePrescription::identity(int dim, std::string id) {
  return {std::move(id), HoleDiffeomorphism::identity(dim), HoleDiffeomorphism::identity(dim),
          0.0};
}

GaugePrescription make_prescription(const PrescriptionSpec& spec, int dim, double t0) {
  return {spec.id,
          spec.left ? make_deformation(*spec.left, dim) : HoleDiffeomorphism::identity(dim),
          spec.right ? make_deformation(*spec.right, dim) : HoleDiffeomorphism::identity(dim),
          t0};
}

namespace {

BranchPair transform_pair(const BranchPair& pair, const HoleDiffeomorphism& left,
                          const HoleDiffeomorphism& right, const PushForwardOptions& options) {
  std::optional<std::pair<WaveFunction, WaveFunction>> snapshots;
  if (pair.pre_interaction()) {
    snapshots.emplace(push_forward(pair.pre_interaction()->first, left, options),
                      push_forward(pair.pre_interaction()->second, right, options));
  }
  return BranchPair(push_forward(pair.left(), left, options),
                    push_forward(pair.right(), right, options), pair.history(),
                    std::move(snapshots));
}

}  // namespace

BranchPair realign(const BranchPair& pair, const GaugePrescription& prescription,
                   const PushForwardOptions& options) {
  BranchPair out =
      transform_pair(pair, prescription.left.inverse(), prescription.right.inverse(), options);
  if (out.pre_interaction()) {
    const Complex overlap =
        inner_product(out.pre_interaction()->first, out.pre_interaction()->second);
    if (!(overlap.real() >= kRealignOverlapThreshold)) {
      std::ostringstream msg;
      msg << "prescription '" << prescription.id
          << "' does not align the branches before the interaction: Re<psi_l|psi_r>(t0) = "
          << std::setprecision(12) << overlap.real() << " < " << kRealignOverlapThreshold;
      throw PrescriptionMismatch(msg.str());
    }
  }
  return out;
}

BranchPair deform(const BranchPair& pair, const GaugePrescription& prescription,
                  const PushForwardOptions& options) {
  return transform_pair(pair, prescription.left, prescription.right, options);
}

std::vector<GaugeRow> compare_gauges(const BranchPair& pair,
                                     std::span<const GaugePrescription> prescriptions,
                                     int threads) {
  std::vector<GaugeRow> rows(prescriptions.size());
  parallel_for(prescriptions.size(), threads, [&](std::size_t i) {
    const auto result =
        transition_probability(realign(pair, prescriptions[i]), kTransformedNormTolerance);
    rows[i] = {prescriptions[i].id, result.rho_trans, result.overlap};
  });
  return rows;
}

std::vector<GaugeRow> compare_gauges(const ScenarioConfig& scenario,
                                     std::span<const GaugePrescription> prescriptions,
                                     int threads) {
  return compare_gauges(evolve_branches(scenario, threads), prescriptions, threads);
}

}  // namespace nqg
