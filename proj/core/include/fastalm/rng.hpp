#pragma once

#include <cstdint>
#include <random>

#include "fastalm/types.hpp"

namespace fastalm {

/// Portable seeded generator.
///
/// Engine: std::mt19937_64, whose output stream is fixed by the C++ standard.
/// Uniforms take the top 53 bits of one engine draw: u = (w >> 11) * 2^-53.
/// Normals use the Box-Muller transform on two uniforms (u1 drawn first),
/// producing r*cos(2*pi*u2) then r*sin(2*pi*u2) with r = sqrt(-2 ln(1 - u1)).
/// Matrices are filled column by column. The standard-library distributions
/// are implementation-defined, so they are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  Matrix normal_matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fastalm
