#include "nqg/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nqg/error.hpp"

namespace nqg {

PotentialField::PotentialField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("potential has the wrong number of samples for its grid");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw NumericalError("potential contains a non-finite value");
  }
}

double PotentialField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool PotentialField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

PotentialField sample_potential(const Grid& grid, std::span<const NewtonianSource> sources,
                                double test_mass) {
  if (sources.empty()) {
    throw InvalidArgument("sample_potential needs at least one source; use zero_potential");
  }
  if (!(test_mass > 0.0)) throw InvalidArgument("masses.m must be positive");

  const double h = grid.spacing();
  const auto n = static_cast<long long>(grid.n());
  std::vector<double> values(grid.size(), 0.0);

  for (const auto& s : sources) {
    if (!(s.mass > 0.0) || !std::isfinite(s.mass)) {
      throw InvalidArgument("sources.M must be positive and finite");
    }
    if (!(s.softening >= h)) {
      std::ostringstream msg;
      msg << "sources.eps " << s.softening << " is below the grid spacing " << h;
      throw InvalidArgument(msg.str());
    }
    // Source position in index units, split into whole cells and a fraction.
    std::array<long long, 3> cell{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int d = 0; d < grid.dim(); ++d) {
      const double q = (s.position[d] + 0.5 * grid.length()) / h;
      const double whole = std::floor(q);
      cell[d] = static_cast<long long>(whole);
      frac[d] = q - whole;
    }
    const double coupling = test_mass * s.mass;
    const double eps2 = s.softening * s.softening;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto idx = grid.unflatten(i);
      double r2 = 0.0;
      for (int d = 0; d < grid.dim(); ++d) {
        long long k = (static_cast<long long>(idx[d]) - cell[d]) % n;
        if (k < 0) k += n;
        if (k >= n / 2) k -= n;  // minimum image in [-n/2, n/2)
        const double dx = (static_cast<double>(k) - frac[d]) * h;
        r2 += dx * dx;
      }
      values[i] -= coupling / std::sqrt(r2 + eps2);
    }
  }
  return PotentialField(grid, std::move(values));
}

PotentialField zero_potential(const Grid& grid) {
  return PotentialField(grid, std::vector<double>(grid.size(), 0.0));
}

}  // namespace nqg
