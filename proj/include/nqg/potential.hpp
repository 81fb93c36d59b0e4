#pragma once

#include <span>
#include <vector>

#include "nqg/lattice.hpp"

namespace nqg {

/// Classical point mass frozen at one position, with Plummer softening.
struct NewtonianSource {
  Coord position{};
  double mass = 1.0;
  double softening = 0.1;
};

/// Real potential sampled on a lattice.
class PotentialField {
 public:
  PotentialField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double max_abs() const;
  bool is_zero() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// V(x) = sum_s -test_mass * M_s / sqrt(|x - x_s|^2 + eps_s^2).
///
/// Distances use the minimum image on the periodic lattice, computed in
/// index space, so that moving a source by whole cells permutes the values
/// exactly whenever the source position is representable on the lattice.
PotentialField sample_potential(const Grid& grid, std::span<const NewtonianSource> sources,
                                double test_mass);

PotentialField zero_potential(const Grid& grid);

}  // namespace nqg
