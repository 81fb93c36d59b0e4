#include "nqg/lattice.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "nqg/error.hpp"

namespace nqg {

Grid::Grid(int dim, std::size_t n, double length) : dim_(dim), n_(n), length_(length) {
  if (dim < 1 || dim > 3) {
    throw InvalidArgument("grid.dim must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  }
  if (n < 2 || !std::has_single_bit(n)) {
    throw InvalidArgument("grid.n must be a power of two >= 2 (got " + std::to_string(n) + ")");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("grid.length must be positive and finite");
  }
  size_ = 1;
  for (int d = 0; d < dim; ++d) size_ *= n;
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }

int Grid::log2n() const { return std::countr_zero(n_); }

double Grid::coordinate(std::size_t i) const {
  return -0.5 * length_ + static_cast<double>(i) * spacing();
}

std::array<std::size_t, 3> Grid::unflatten(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    idx[d] = flat % n_;
    flat /= n_;
  }
  return idx;
}

std::size_t Grid::flatten(const std::array<std::size_t, 3>& idx) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim_; ++d) flat = flat * n_ + idx[d];
  return flat;
}

Coord Grid::point(std::size_t flat) const {
  const auto idx = unflatten(flat);
  Coord x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) x[d] = coordinate(idx[d]);
  return x;
}

WaveFunction::WaveFunction(Grid grid, std::vector<Complex> amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "wave function has " << amplitudes_.size() << " amplitudes, grid needs "
        << grid_.size();
    throw InvalidArgument(msg.str());
  }
  for (const auto& a : amplitudes_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw NumericalError("wave function contains a non-finite amplitude");
    }
  }
}

WaveFunction WaveFunction::zeros(const Grid& grid) {
  return WaveFunction(grid, std::vector<Complex>(grid.size()));
}

WaveFunction WaveFunction::scaled(Complex factor) const {
  std::vector<Complex> out(amplitudes_);
  for (auto& a : out) a *= factor;
  return WaveFunction(grid_, std::move(out));
}

WaveFunction WaveFunction::conjugated() const {
  std::vector<Complex> out(amplitudes_);
  for (auto& a : out) a = std::conj(a);
  return WaveFunction(grid_, std::move(out));
}

std::vector<Complex> WaveFunction::release() && { return std::move(amplitudes_); }

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) {
    throw GridMismatch(
        "inner product of wave functions on different lattices; resample explicitly first");
  }
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // conj(x) * y
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return Complex(re, im) * a.grid().cell_volume();
}

double norm(const WaveFunction& a) {
  double sum = 0.0;
  for (const auto& v : a.amplitudes()) sum += std::norm(v);
  return std::sqrt(sum * a.grid().cell_volume());
}

double packet_tail_amplitude(double distance, double width) {
  return std::exp(-distance * distance / (4.0 * width * width));
}

WaveFunction gaussian_packet(const Grid& grid, const Coord& center, double width,
                             const Coord& momentum) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw InvalidArgument("packet.width must be positive");
  }
  const double h = grid.spacing();
  if (width < kMinPointsPerWidth * h) {
    std::ostringstream msg;
    msg << "packet.width " << width << " is under-resolved: needs spacing <= "
        << width / kMinPointsPerWidth << " (grid spacing is " << h << ")";
    throw InvalidArgument(msg.str());
  }
  for (int d = 0; d < grid.dim(); ++d) {
    const double to_boundary = 0.5 * grid.length() - std::abs(center[d]);
    if (to_boundary <= 0.0 || packet_tail_amplitude(to_boundary, width) >= kBoundaryTailLimit) {
      std::ostringstream msg;
      msg << "packet.center axis " << d << " leaves a boundary amplitude above "
          << kBoundaryTailLimit << "; grid.length must exceed "
          << 2.0 * (std::abs(center[d]) + 2.0 * width * std::sqrt(std::log(1.0 / kBoundaryTailLimit)));
      throw InvalidArgument(msg.str());
    }
  }

  std::vector<Complex> amps(grid.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const Coord x = grid.point(i);
    double r2 = 0.0;
    double phase = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double dx = x[d] - center[d];
      r2 += dx * dx;
      phase += momentum[d] * x[d];
    }
    amps[i] = std::exp(-r2 / (4.0 * width * width)) * std::polar(1.0, phase);
  }
  WaveFunction psi(grid, std::move(amps));
  return psi.scaled(1.0 / norm(psi));
}

Coord position_expectation(const WaveFunction& psi) {
  const Grid& grid = psi.grid();
  Coord mean{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = std::norm(psi[i]);
    const Coord x = grid.point(i);
    for (int d = 0; d < grid.dim(); ++d) mean[d] += w * x[d];
  }
  for (auto& m : mean) m *= grid.cell_volume();
  return mean;
}

double position_spread(const WaveFunction& psi, int axis) {
  const Grid& grid = psi.grid();
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = std::norm(psi[i]);
    m0 += w;
    m1 += w * grid.coordinate(grid.unflatten(i)[axis]);
  }
  const double mean = m1 / m0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double dx = grid.coordinate(grid.unflatten(i)[axis]) - mean;
    m2 += std::norm(psi[i]) * dx * dx;
  }
  return std::sqrt(m2 / m0);
}

}  // namespace nqg
