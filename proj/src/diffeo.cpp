#include "nqg/diffeo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "nqg/decoherence.hpp"
#include "nqg/error.hpp"

namespace nqg {

namespace {

constexpr double kPlateauEdge = 0.5;

// exp(-1/t) for t > 0, the building block of C-infinity transitions.
double smooth_seed(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_seed_derivative(double t) {
  return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0;
}

// 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  const double a = smooth_seed(t);
  const double b = smooth_seed(1.0 - t);
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = smooth_seed(t);
  const double b = smooth_seed(1.0 - t);
  const double da = smooth_seed_derivative(t);
  const double db = -smooth_seed_derivative(1.0 - t);
  return (da * b - a * db) / ((a + b) * (a + b));
}

double dot(const Coord& a, const Coord& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double length(const Coord& a) { return std::sqrt(dot(a, a)); }

Coord sub(const Coord& a, const Coord& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace

BumpProfile parse_bump_profile(std::string_view name) {
  if (name == "standard") return BumpProfile::standard;
  if (name == "plateau") return BumpProfile::plateau;
  throw InvalidArgument("unknown bump profile '" + std::string(name) +
                        "' (expected standard or plateau)");
}

std::string_view to_string(BumpProfile profile) {
  return profile == BumpProfile::standard ? "standard" : "plateau";
}

double bump_value(BumpProfile profile, double s) {
  s = std::abs(s);
  if (s >= 1.0) return 0.0;
  switch (profile) {
    case BumpProfile::standard:
      return std::exp(1.0 - 1.0 / (1.0 - s * s));
    case BumpProfile::plateau:
      return smooth_step((1.0 - s) / (1.0 - kPlateauEdge));
  }
  return 0.0;
}

double bump_derivative(BumpProfile profile, double s) {
  const double sign = s < 0.0 ? -1.0 : 1.0;
  s = std::abs(s);
  if (s >= 1.0) return 0.0;
  switch (profile) {
    case BumpProfile::standard: {
      const double q = 1.0 - s * s;
      return sign * std::exp(1.0 - 1.0 / q) * (-2.0 * s / (q * q));
    }
    case BumpProfile::plateau:
      return -sign * smooth_step_derivative((1.0 - s) / (1.0 - kPlateauEdge)) /
             (1.0 - kPlateauEdge);
  }
  return 0.0;
}

double bump_max_slope(BumpProfile profile) {
  auto compute = [](BumpProfile p) {
    constexpr int kSamples = 200000;
    int best = 0;
    double best_val = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
      const double v = std::abs(bump_derivative(p, static_cast<double>(i) / kSamples));
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    // Golden-section refinement around the best sample.
    double lo = std::max(0.0, (best - 1.0) / kSamples);
    double hi = std::min(1.0, (best + 1.0) / kSamples);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double a = hi - g * (hi - lo);
      const double b = lo + g * (hi - lo);
      if (std::abs(bump_derivative(p, a)) > std::abs(bump_derivative(p, b))) {
        hi = b;
      } else {
        lo = a;
      }
    }
    return std::max(best_val, std::abs(bump_derivative(p, 0.5 * (lo + hi))));
  };
  static const double standard = compute(BumpProfile::standard);
  static const double plateau = compute(BumpProfile::plateau);
  return profile == BumpProfile::standard ? standard : plateau;
}

HoleDiffeomorphism::HoleDiffeomorphism(int dim, const Coord& center, double radius,
                                       const Coord& amplitude, BumpProfile profile)
    : dim_(dim), center_(center), radius_(radius), amplitude_(amplitude), profile_(profile) {
  if (dim < 1 || dim > 3) throw InvalidArgument("deformation dimension must be 1, 2 or 3");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("deformation.radius must be positive");
  }
  for (int d = 0; d < 3; ++d) {
    if (!std::isfinite(center[d]) || !std::isfinite(amplitude[d])) {
      throw InvalidArgument("deformation center and amplitude must be finite");
    }
    if (d >= dim && (center[d] != 0.0 || amplitude[d] != 0.0)) {
      throw InvalidArgument("deformation has components beyond the grid dimension");
    }
  }
  const double kappa = lipschitz_bound();
  if (kappa >= kMaxLipschitz) {
    std::ostringstream msg;
    msg << "deformation Jacobian bound " << kappa << " >= " << kMaxLipschitz
        << "; reduce |amplitude| below " << kMaxLipschitz * radius / bump_max_slope(profile)
        << " or enlarge the radius";
    throw InvalidArgument(msg.str());
  }
}

HoleDiffeomorphism HoleDiffeomorphism::identity(int dim) {
  return HoleDiffeomorphism(dim, Coord{}, 1.0, Coord{});
}

bool HoleDiffeomorphism::is_identity() const {
  return amplitude_[0] == 0.0 && amplitude_[1] == 0.0 && amplitude_[2] == 0.0;
}

double HoleDiffeomorphism::lipschitz_bound() const {
  return length(amplitude_) * bump_max_slope(profile_) / radius_;
}

HoleDiffeomorphism HoleDiffeomorphism::inverse() const {
  HoleDiffeomorphism inv(*this);
  inv.inverted_ = !inverted_;
  return inv;
}

bool HoleDiffeomorphism::in_hole(const Coord& x) const {
  return !is_identity() && length(sub(x, center_)) < radius_;
}

Coord HoleDiffeomorphism::displacement(const Coord& x) const {
  const double b = bump_value(profile_, length(sub(x, center_)) / radius_);
  return {amplitude_[0] * b, amplitude_[1] * b, amplitude_[2] * b};
}

double HoleDiffeomorphism::bump_jacobian_determinant(const Coord& x) const {
  // grad u = a (x) grad B, so det(I + grad u) = 1 + a . grad B.
  const Coord rel = sub(x, center_);
  const double dist = length(rel);
  if (dist == 0.0 || dist >= radius_) return 1.0;
  const double slope = bump_derivative(profile_, dist / radius_) / (radius_ * dist);
  return 1.0 + slope * dot(amplitude_, rel);
}

Coord HoleDiffeomorphism::solve_bump_inverse(const Coord& y) const {
  if (!in_hole(y)) return y;  // the hole maps onto itself
  constexpr int kMaxIterations = 100;
  const double scale = radius_ + length(center_) + length(y);
  Coord x = y;
  int it = 0;
  // Plain contraction x <- y - u(x) until close, then Newton to round-off.
  for (; it < kMaxIterations; ++it) {
    const Coord u = displacement(x);
    const Coord next{y[0] - u[0], y[1] - u[1], y[2] - u[2]};
    const double change = length(sub(next, x));
    x = next;
    if (change < 1e-3 * radius_) break;
  }
  for (; it < kMaxIterations; ++it) {
    const Coord u = displacement(x);
    const Coord residual{x[0] + u[0] - y[0], x[1] + u[1] - y[1], x[2] + u[2] - y[2]};
    // Sherman-Morrison: (I + a g^T)^-1 r = r - a (g . r) / (1 + g . a)
    const Coord rel = sub(x, center_);
    const double dist = length(rel);
    Coord g{0.0, 0.0, 0.0};
    if (dist > 0.0 && dist < radius_) {
      const double slope = bump_derivative(profile_, dist / radius_) / (radius_ * dist);
      g = {slope * rel[0], slope * rel[1], slope * rel[2]};
    }
    const double coef = dot(g, residual) / (1.0 + dot(g, amplitude_));
    const Coord delta{residual[0] - amplitude_[0] * coef, residual[1] - amplitude_[1] * coef,
                      residual[2] - amplitude_[2] * coef};
    x = sub(x, delta);
    if (length(delta) <= 1e-15 * scale) return x;
  }
  std::ostringstream msg;
  msg << "inverse of the hole deformation did not converge in " << kMaxIterations
      << " iterations at y = (" << y[0] << ", " << y[1] << ", " << y[2] << ")";
  throw ConvergenceError(msg.str());
}

Coord HoleDiffeomorphism::operator()(const Coord& x) const {
  if (inverted_) return solve_bump_inverse(x);
  const Coord u = displacement(x);
  return {x[0] + u[0], x[1] + u[1], x[2] + u[2]};
}

Coord HoleDiffeomorphism::inverse_map(const Coord& y) const {
  if (!inverted_) return solve_bump_inverse(y);
  const Coord u = displacement(y);
  return {y[0] + u[0], y[1] + u[1], y[2] + u[2]};
}

HoleDiffeomorphism::Preimage HoleDiffeomorphism::preimage(const Coord& y) const {
  if (!inverted_) {
    const Coord x = solve_bump_inverse(y);
    return {x, 1.0 / std::abs(bump_jacobian_determinant(x))};
  }
  const Coord u = displacement(y);
  return {{y[0] + u[0], y[1] + u[1], y[2] + u[2]}, std::abs(bump_jacobian_determinant(y))};
}

void HoleDiffeomorphism::check_inside(const Grid& grid) const {
  if (grid.dim() != dim_) {
    throw InvalidArgument("deformation dimension does not match the grid");
  }
  if (is_identity()) return;
  for (int d = 0; d < dim_; ++d) {
    if (std::abs(center_[d]) + radius_ >= 0.5 * grid.length()) {
      std::ostringstream msg;
      msg << "deformation hole (center " << center_[d] << ", radius " << radius_
          << ") crosses the periodic boundary on axis " << d << "; grid.length must exceed "
          << 2.0 * (std::abs(center_[d]) + radius_);
      throw InvalidArgument(msg.str());
    }
  }
}

int default_refinement(int dim) {
  switch (dim) {
    case 1: return 8;
    case 2: return 4;
    default: return 2;
  }
}

namespace {

/// Band-limited interpolant of a lattice field, resampled on a grid refined
/// by an integer factor and then evaluated with tensor-product cubic
/// Lagrange interpolation (fourth order in the fine spacing).
class RefinedField {
 public:
  RefinedField(const WaveFunction& psi, int refinement)
      : grid_(psi.grid()), factor_(refinement), fine_n_(psi.grid().n() * refinement) {
    const int dim = grid_.dim();
    const std::size_t n = grid_.n();
    std::vector<Complex> coarse(psi.amplitudes().begin(), psi.amplitudes().end());
    detail::FftPlan coarse_plan(dim, n);
    coarse_plan.forward(coarse);

    std::size_t fine_size = 1;
    for (int d = 0; d < dim; ++d) fine_size *= fine_n_;
    fine_.assign(fine_size, Complex{});
    const double scale = 1.0 / static_cast<double>(grid_.size());

    for (std::size_t i = 0; i < coarse.size(); ++i) {
      const auto idx = grid_.unflatten(i);
      // Each axis contributes one fine bin, or two half-weight bins for the
      // Nyquist frequency so the interpolant stays symmetric.
      std::array<std::array<std::size_t, 2>, 3> bins{};
      std::array<int, 3> count{1, 1, 1};
      std::array<double, 3> weight{1.0, 1.0, 1.0};
      for (int d = 0; d < dim; ++d) {
        const long long j = detail::signed_frequency(idx[d], n);
        const auto fn = static_cast<long long>(fine_n_);
        bins[d][0] = static_cast<std::size_t>((j % fn + fn) % fn);
        if (j == -static_cast<long long>(n / 2)) {
          bins[d][1] = n / 2;
          count[d] = 2;
          weight[d] = 0.5;
        }
      }
      const Complex c = coarse[i] * scale * weight[0] * weight[1] * weight[2];
      for (int a = 0; a < count[0]; ++a) {
        for (int b = 0; b < (dim > 1 ? count[1] : 1); ++b) {
          for (int e = 0; e < (dim > 2 ? count[2] : 1); ++e) {
            std::size_t flat = bins[0][a];
            if (dim > 1) flat = flat * fine_n_ + bins[1][b];
            if (dim > 2) flat = flat * fine_n_ + bins[2][e];
            fine_[flat] += c;
          }
        }
      }
    }
    detail::FftPlan fine_plan(dim, fine_n_);
    fine_plan.backward(fine_);
  }

  Complex operator()(const Coord& x) const {
    const int dim = grid_.dim();
    const double hf = grid_.spacing() / factor_;
    std::array<std::array<std::size_t, 4>, 3> nodes{};
    std::array<std::array<double, 4>, 3> w{};
    for (int d = 0; d < 3; ++d) {
      if (d >= dim) {
        w[d] = {1.0, 0.0, 0.0, 0.0};
        continue;
      }
      const double u = (x[d] + 0.5 * grid_.length()) / hf;
      const double base = std::floor(u);
      const double f = u - base;
      w[d] = {-f * (f - 1.0) * (f - 2.0) / 6.0, (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
              -(f + 1.0) * f * (f - 2.0) / 2.0, (f + 1.0) * f * (f - 1.0) / 6.0};
      const auto fn = static_cast<long long>(fine_n_);
      const auto b = static_cast<long long>(base);
      for (int k = 0; k < 4; ++k) {
        nodes[d][k] = static_cast<std::size_t>(((b - 1 + k) % fn + fn) % fn);
      }
    }
    Complex sum{};
    const int n1 = dim > 1 ? 4 : 1;
    const int n2 = dim > 2 ? 4 : 1;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < n1; ++b) {
        for (int e = 0; e < n2; ++e) {
          std::size_t flat = nodes[0][a];
          if (dim > 1) flat = flat * fine_n_ + nodes[1][b];
          if (dim > 2) flat = flat * fine_n_ + nodes[2][e];
          sum += w[0][a] * w[1][b] * w[2][e] * fine_[flat];
        }
      }
    }
    return sum;
  }

 private:
  Grid grid_;
  int factor_;
  std::size_t fine_n_;
  std::vector<Complex> fine_;
};

enum class SampleAt { inverse_image, forward_image };

WaveFunction resample(const WaveFunction& psi, const HoleDiffeomorphism& d, SampleAt where,
                      TransformWeight weight, int refinement) {
  const Grid& grid = psi.grid();
  d.check_inside(grid);
  if (d.is_identity()) return psi;
  if (refinement == 0) refinement = default_refinement(grid.dim());
  if (refinement < 1) throw InvalidArgument("refinement factor must be >= 1");

  const RefinedField field(psi, refinement);
  std::vector<Complex> out(psi.amplitudes().begin(), psi.amplitudes().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Coord y = grid.point(i);
    if (!d.in_hole(y)) continue;
    if (where == SampleAt::forward_image) {
      out[i] = field(d(y));
      continue;
    }
    const auto pre = d.preimage(y);
    Complex v = field(pre.point);
    if (weight == TransformWeight::half_density) v *= std::sqrt(pre.volume_factor);
    out[i] = v;
  }
  return WaveFunction(grid, std::move(out));
}

}  // namespace

WaveFunction push_forward(const WaveFunction& psi, const HoleDiffeomorphism& d,
                          const PushForwardOptions& options) {
  return resample(psi, d, SampleAt::inverse_image, options.weight, options.refinement);
}

WaveFunction reference_pullback(const WaveFunction& psi, const HoleDiffeomorphism& map_y,
                                const PushForwardOptions& options) {
  return resample(psi, map_y, SampleAt::forward_image, TransformWeight::scalar,
                  options.refinement);
}

CovarianceReport weak_covariance_check(const BranchPair& pair, const HoleDiffeomorphism& d,
                                       const PushForwardOptions& options) {
  CovarianceReport report;
  report.overlap_before = inner_product(pair.left(), pair.right());
  const WaveFunction left = push_forward(pair.left(), d, options);
  const WaveFunction right = push_forward(pair.right(), d, options);
  report.overlap_after = inner_product(left, right);
  report.deviation = std::abs(report.overlap_after - report.overlap_before);
  return report;
}

double gaussian_support_radius(double width) {
  return 2.0 * width * std::sqrt(std::log(1.0 / kBoundaryTailLimit));
}

namespace {
constexpr double kPairLipschitz = 0.85;
constexpr double kPairGapFraction = 0.25;
}  // namespace

DisjointPairGeometry disjoint_pair_geometry(const SupportRegion& support, int dim) {
  const double w = support.radius;
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("support radius must be positive");
  const double slope = bump_max_slope(BumpProfile::standard);
  // Images of U along axis 0 are separated by 2 (a B(w/r) - w); require a
  // gap of kPairGapFraction * w with a = kappa r / sup|B'|.
  const double needed = (1.0 + 0.5 * kPairGapFraction) * w;
  auto reach = [&](double r) {
    return kPairLipschitz * r / slope * bump_value(BumpProfile::standard, w / r);
  };
  double lo = w;
  double hi = 2.0 * w;
  while (reach(hi) < needed) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reach(mid) < needed ? lo : hi) = mid;
  }
  DisjointPairGeometry geo{};
  geo.hole_radius = hi;
  geo.amplitude = kPairLipschitz * hi / slope;
  double extent = 0.0;
  for (int d = 0; d < dim; ++d) extent = std::max(extent, std::abs(support.center[d]));
  geo.required_length = 2.0 * (extent + geo.hole_radius);
  return geo;
}

DeformationPair disjoint_deformation_pair(const SupportRegion& support, const Grid& grid) {
  const auto geo = disjoint_pair_geometry(support, grid.dim());
  if (!(grid.length() > geo.required_length)) {
    std::ostringstream msg;
    msg << "disjoint deformation pair for a support of radius " << support.radius
        << " needs a hole of radius " << geo.hole_radius << "; grid.length must exceed "
        << geo.required_length << " (is " << grid.length() << ")";
    throw InvalidArgument(msg.str());
  }
  Coord center{};
  for (int d = 0; d < grid.dim(); ++d) center[d] = support.center[d];
  const Coord push{geo.amplitude, 0.0, 0.0};
  const Coord pull{-geo.amplitude, 0.0, 0.0};
  DeformationPair pair{HoleDiffeomorphism(grid.dim(), center, geo.hole_radius, push),
                       HoleDiffeomorphism(grid.dim(), center, geo.hole_radius, pull)};
  pair.first.check_inside(grid);
  pair.second.check_inside(grid);
  return pair;
}

}  // namespace nqg
