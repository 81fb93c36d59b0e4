#include "nqg/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "nqg/error.hpp"

namespace nqg {
namespace {

constexpr std::array<char, 4> kMagic{'N', 'Q', 'G', 'W'};


void put_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes.data(), 8);
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw InvalidArgument("wave function dump is truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_wavefunction(std::ostream& out, const WaveFunction& psi) {
  const Grid& g = psi.grid();
  out.write(kMagic.data(), 4);
  const std::array<char, 4> shape{static_cast<char>(g.dim()), static_cast<char>(g.log2n()), 0, 0};
  out.write(shape.data(), 4);
  put_f64(out, g.length());
  for (const auto& a : psi.amplitudes()) {
    put_f64(out, a.real());
    put_f64(out, a.imag());
  }
  if (!out) throw Error("failed to write wave function dump");
}

WaveFunction read_wavefunction(std::istream& in) {
  std::array<char, 8> head;
  in.read(head.data(), 8);
  if (!in) throw InvalidArgument("wave function dump is truncated");
  if (std::memcmp(head.data(), kMagic.data(), 4) != 0) {
    throw InvalidArgument("not a wave function dump (bad magic)");
  }
  const int dim = static_cast<unsigned char>(head[4]);
  const int log2n = static_cast<unsigned char>(head[5]);
  if (log2n >= 31) throw InvalidArgument("wave function dump has an absurd log2(n)");
  const double length = get_f64(in);
  Grid grid(dim, std::size_t{1} << log2n, length);
  std::vector<Complex> amps(grid.size());
  for (auto& a : amps) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    a = {re, im};
  }
  return WaveFunction(grid, std::move(amps));
}

void save_wavefunction(const std::filesystem::path& path, const WaveFunction& psi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_wavefunction(out, psi);
}

WaveFunction load_wavefunction(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_wavefunction(in);
}

void write_slice_csv(std::ostream& out, const WaveFunction& psi, int axis) {
  const Grid& g = psi.grid();
  if (axis < 0 || axis >= g.dim()) throw InvalidArgument("slice axis out of range");
  std::array<std::size_t, 3> idx{g.n() / 2, g.n() / 2, g.n() / 2};
  out << "x,re,im,abs2\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < g.n(); ++i) {
    idx[axis] = i;
    const Complex a = psi[g.flatten(idx)];
    out << g.coordinate(i) << ',' << a.real() << ',' << a.imag() << ',' << std::norm(a) << '\n';
  }
}

}  // namespace nqg
