#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nqg/decoherence.hpp"
#include "nqg/diffeo.hpp"
#include "nqg/scenario.hpp"

namespace nqg {

/// (t, x, y, z)
using SpacetimePoint = std::array<double, 4>;
using Metric4 = Eigen::Matrix4d;

enum class MetricFamily {
  minkowski_cartesian,
  schwarzschild_standard,   ///< Schwarzschild areal radius as |x|
  schwarzschild_harmonic,   ///< harmonic radius R = r - M as |x|
  weak_field_newtonian,     ///< diag(-(1 + 2 Phi), (1 - 2 Phi) delta_ij)
};

MetricFamily parse_metric_family(std::string_view name);
std::string_view to_string(MetricFamily family);

/// Newtonian potential of a point mass moving uniformly:
/// Phi(t, x) = -mass / sqrt(|x - position - velocity t|^2 + softening^2).
struct WeakFieldPotential {
  double mass = 0.0;
  Coord position{};
  Coord velocity{};
  double softening = 0.5;

  double operator()(const SpacetimePoint& p) const;
};

/// Closed-form metric in geometric units c = G = 1.
class MetricField {
 public:
  static MetricField minkowski();
  static MetricField schwarzschild_standard(double mass);
  static MetricField schwarzschild_harmonic(double mass);
  /// With `linearized`, density() is the first-order expansion
  /// eta^{mu nu} - h^{mu nu} + eta^{mu nu} h / 2, which is linear in Phi.
  static MetricField weak_field(const WeakFieldPotential& potential, bool linearized);

  MetricFamily family() const { return family_; }
  double mass() const { return mass_; }

  /// Schwarzschild families reject r <= 2M (1 + 1e-6), with r the areal
  /// radius; weak-field rejects |Phi| >= 1/2.
  bool in_domain(const SpacetimePoint& p) const;

  /// g_{mu nu}(p). Symmetric; throws unless p is in the domain and the
  /// signature is (-, +, +, +).
  Metric4 metric(const SpacetimePoint& p) const;

  /// sqrt(-g) g^{mu nu}(p).
  Metric4 density(const SpacetimePoint& p) const;

 private:
  MetricField(MetricFamily family, double mass) : family_(family), mass_(mass) {}

  MetricFamily family_;
  double mass_ = 0.0;
  WeakFieldPotential potential_;
  bool linearized_ = false;
};

MetricField make_metric(const MetricSpec& spec);

/// d_mu (sqrt(-g) g^{mu nu}) for nu = 0..3 by second-order central
/// differences with step h.
std::array<double, 4> harmonic_residual(const MetricField& metric, const SpacetimePoint& point,
                                        double h);

struct ResidualSample {
  SpacetimePoint point;
  std::array<double, 4> residual;
};

/// Header `t,x,y,z,r0,r1,r2,r3`; 17 significant digits.
void write_residual_csv(std::ostream& out, std::span<const ResidualSample> samples);

/// For each branch, the deformation its coordinates carry relative to the
/// preferred coordinates; realign() undoes them.
struct GaugePrescription {
  std::string id;
  HoleDiffeomorphism left;
  HoleDiffeomorphism right;
  double t0 = 0.0;

  static GaugePrescription identity(int dim, std::string id = "identity");
};

GaugePrescription make_prescription(const PrescriptionSpec& spec, int dim, double t0);

/// Realigned pre-interaction overlap must reach this value.
inline constexpr double kRealignOverlapThreshold = 1.0 - 1e-6;

/// Pushes each branch forward with the inverse of its recorded deformation.
/// When the pair carries pre-interaction snapshots they are transformed the
/// same way and must then agree (Re overlap >= kRealignOverlapThreshold),
/// otherwise PrescriptionMismatch is thrown.
BranchPair realign(const BranchPair& pair, const GaugePrescription& prescription,
                   const PushForwardOptions& options = {});

/// The opposite of realign: expresses a pair given in preferred coordinates
/// in the coordinates described by `prescription`.
BranchPair deform(const BranchPair& pair, const GaugePrescription& prescription,
                  const PushForwardOptions& options = {});

struct GaugeRow {
  std::string prescription_id;
  double rho_trans;
  Complex overlap;
};

/// rho_trans of the scenario's branch pair under each prescription.
std::vector<GaugeRow> compare_gauges(const ScenarioConfig& scenario,
                                     std::span<const GaugePrescription> prescriptions,
                                     int threads = 1);

/// Same, for an already evolved pair.
std::vector<GaugeRow> compare_gauges(const BranchPair& pair,
                                     std::span<const GaugePrescription> prescriptions,
                                     int threads = 1);

}  // namespace nqg
