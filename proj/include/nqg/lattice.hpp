#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nqg {

using Complex = std::complex<double>;

/// Spatial point or vector. Components beyond the grid dimension are zero.
using Coord = std::array<double, 3>;

/// Uniform periodic lattice with the same number of points on every axis.
///
/// Point index i on an axis sits at x_i = -length/2 + i * spacing. Flat
/// indices are row-major with axis 0 slowest:
/// flat = (i0 * n + i1) * n + i2.
class Grid {
 public:
  Grid(int dim, std::size_t n, double length);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  double cell_volume() const;
  int log2n() const;

  /// Total number of lattice points, n^dim.
  std::size_t size() const { return size_; }

  double coordinate(std::size_t i) const;
  std::array<std::size_t, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<std::size_t, 3>& idx) const;
  Coord point(std::size_t flat) const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  std::size_t n_;
  double length_;
  std::size_t size_;
};

/// Complex amplitudes of one branch on a Grid. Amplitudes are always finite.
class WaveFunction {
 public:
  WaveFunction(Grid grid, std::vector<Complex> amplitudes);

  static WaveFunction zeros(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }
  std::size_t size() const { return amplitudes_.size(); }

  WaveFunction scaled(Complex factor) const;
  WaveFunction conjugated() const;

  /// Moves the amplitude buffer out, leaving this object empty.
  std::vector<Complex> release() &&;

 private:
  Grid grid_;
  std::vector<Complex> amplitudes_;
};

/// Riemann-sum scalar product sum(conj(a_i) b_i) * cell_volume.
/// Throws GridMismatch unless both live on the same lattice.
Complex inner_product(const WaveFunction& a, const WaveFunction& b);

double norm(const WaveFunction& a);

/// Normalized packet proportional to
/// exp(-|x - center|^2 / (4 width^2) + i momentum . x).
///
/// Requires width >= 3 * spacing and a packet amplitude below 1e-10 of
/// its peak at the periodic boundary.
WaveFunction gaussian_packet(const Grid& grid, const Coord& center, double width,
                             const Coord& momentum);

/// Relative amplitude exp(-d^2 / (4 width^2)) of a packet at distance d.
double packet_tail_amplitude(double distance, double width);

inline constexpr double kBoundaryTailLimit = 1e-10;
inline constexpr double kMinPointsPerWidth = 3.0;

/// <x> under |psi|^2, per axis. Assumes a normalized field.
Coord position_expectation(const WaveFunction& psi);

/// Standard deviation of the position along one axis.
double position_spread(const WaveFunction& psi, int axis);

}  // namespace nqg
