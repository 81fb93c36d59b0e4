#pragma once

#include <filesystem>
#include <iosfwd>

#include "nqg/lattice.hpp"

namespace nqg {

/// Binary dump layout, little-endian throughout:
///
///   offset 0   "NQGW"
///   offset 4   u8 dim
///   offset 5   u8 log2(n)
///   offset 6   two zero bytes
///   offset 8   f64 length
///   offset 16  n^dim pairs of (f64 re, f64 im), row-major
void write_wavefunction(std::ostream& out, const WaveFunction& psi);
WaveFunction read_wavefunction(std::istream& in);

void save_wavefunction(const std::filesystem::path& path, const WaveFunction& psi);
WaveFunction load_wavefunction(const std::filesystem::path& path);

/// CSV with header `x,re,im,abs2`: the line along `axis` through the
/// central lattice point (index n/2) of the other axes.
void write_slice_csv(std::ostream& out, const WaveFunction& psi, int axis = 0);

}  // namespace nqg
