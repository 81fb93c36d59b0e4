#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nqg/lattice.hpp"

namespace nqg {

class BranchPair;

/// C-infinity bump profiles B(s) supported in |s| < 1 with B(0) = 1.
enum class BumpProfile {
  standard,  ///< exp(1 - 1/(1 - s^2))
  plateau,   ///< 1 on |s| <= 1/2, smooth monotone decay to 0 at |s| = 1
};

BumpProfile parse_bump_profile(std::string_view name);
std::string_view to_string(BumpProfile profile);

double bump_value(BumpProfile profile, double s);
/// dB/ds at radial argument s >= 0.
double bump_derivative(BumpProfile profile, double s);
/// sup |dB/ds|, located numerically on a fine sample once per profile.
double bump_max_slope(BumpProfile profile);

/// Sup-norm bound on the Jacobian of the displacement above which a
/// deformation is rejected.
inline constexpr double kMaxLipschitz = 0.9;

/// Compactly supported diffeomorphism x -> x + a B(|x - c| / r).
///
/// The map is the identity outside the ball |x - c| < r (the hole). The
/// Jacobian of the displacement is bounded by kappa = |a| sup|B'| / r, which
/// must stay below kMaxLipschitz; then the map is invertible and its inverse
/// is obtained by a contraction iteration.
///
/// A value may also represent the inverse of such a map (see inverse()).
class HoleDiffeomorphism {
 public:
  HoleDiffeomorphism(int dim, const Coord& center, double radius, const Coord& amplitude,
                     BumpProfile profile = BumpProfile::standard);

  static HoleDiffeomorphism identity(int dim);

  int dim() const { return dim_; }
  const Coord& center() const { return center_; }
  double radius() const { return radius_; }
  const Coord& amplitude() const { return amplitude_; }
  BumpProfile profile() const { return profile_; }
  bool is_inverted() const { return inverted_; }
  bool is_identity() const;

  double lipschitz_bound() const;

  /// The same deformation traversed backwards.
  HoleDiffeomorphism inverse() const;

  bool in_hole(const Coord& x) const;

  /// Displacement u(x) of the underlying bump map (ignores orientation).
  Coord displacement(const Coord& x) const;
  /// det(I + grad u) of the underlying bump map (ignores orientation).
  double bump_jacobian_determinant(const Coord& x) const;

  /// Applies this map (respecting orientation).
  Coord operator()(const Coord& x) const;
  /// Applies the inverse of this map (respecting orientation).
  Coord inverse_map(const Coord& y) const;

  /// For a target point y returns the preimage x = inverse_map(y) and
  /// |det J_inverse(y)|, the volume factor of the inverse map at y.
  struct Preimage {
    Coord point;
    double volume_factor;
  };
  Preimage preimage(const Coord& y) const;

  /// Throws InvalidArgument unless the hole lies strictly inside the
  /// periodic box of `grid` on every axis.
  void check_inside(const Grid& grid) const;

  bool operator==(const HoleDiffeomorphism&) const = default;

 private:
  HoleDiffeomorphism() = default;
  Coord solve_bump_inverse(const Coord& y) const;

  int dim_ = 1;
  Coord center_{};
  double radius_ = 1.0;
  Coord amplitude_{};
  BumpProfile profile_ = BumpProfile::standard;
  bool inverted_ = false;
};

/// How a wave function transforms under a change of coordinates.
enum class TransformWeight {
  half_density,  ///< psi'(y) = psi(x) |det J(x)|^(-1/2); flat inner products invariant
  scalar,        ///< psi'(y) = psi(x); bare composition
};

struct PushForwardOptions {
  TransformWeight weight = TransformWeight::half_density;
  /// Spectral refinement applied before local cubic interpolation.
  /// 0 selects a per-dimension default.
  int refinement = 0;
};

int default_refinement(int dim);

/// psi'(y) = psi(d^-1(y)) |det J_d(d^-1(y))|^(-1/2), sampled on the same grid.
/// Points outside the hole are copied unchanged.
WaveFunction push_forward(const WaveFunction& psi, const HoleDiffeomorphism& d,
                          const PushForwardOptions& options = {});

/// psi~(x) = psi(y(x)): bare composition with the map, no Jacobian weight.
/// Does not preserve the norm in general.
WaveFunction reference_pullback(const WaveFunction& psi, const HoleDiffeomorphism& map_y,
                                const PushForwardOptions& options = {});

struct CovarianceReport {
  Complex overlap_before;
  Complex overlap_after;
  double deviation = 0.0;
};

/// Applies the same deformation to both branches and compares overlaps.
CovarianceReport weak_covariance_check(const BranchPair& pair, const HoleDiffeomorphism& d,
                                       const PushForwardOptions& options = {});

/// Ball outside which a wave function is considered negligible.
struct SupportRegion {
  Coord center{};
  double radius = 1.0;
};

/// Radius beyond which a Gaussian of the given width falls below
/// kBoundaryTailLimit of its peak amplitude.
double gaussian_support_radius(double width);

struct DeformationPair {
  HoleDiffeomorphism first;
  HoleDiffeomorphism second;
};

/// Two deformations pushing the region U in opposite directions along
/// axis 0 far enough that the images of U are disjoint, separated by a gap
/// of a quarter of U's radius.
DeformationPair disjoint_deformation_pair(const SupportRegion& support, const Grid& grid);

/// Smallest hole radius disjoint_deformation_pair can use for `support`,
/// and the grid length that hole needs.
struct DisjointPairGeometry {
  double hole_radius;
  double amplitude;
  double required_length;
};
DisjointPairGeometry disjoint_pair_geometry(const SupportRegion& support, int dim);

}  // namespace nqg
