#pragma once

#include <cstdint>

#include "pmsz/grid.hpp"

namespace pmsz {

struct NoiseSpec {
  std::uint64_t seed = 0;
  double frequency = 4.0;  // lattice cycles across the domain, first octave
  unsigned octaves = 3;    // lacunarity 2, persistence 0.5
  Dims dims;
};

/// Classic gradient noise with a seeded permutation table, summed over
/// octaves. Each octave gets a seeded sub-lattice offset so grid points do
/// not land on lattice corners, where the noise is exactly zero.
ScalarField perlin(const NoiseSpec& spec);

/// f(x, y, z) = a x + b y + c z
ScalarField ramp(const Dims& dims, double a, double b, double c = 0.0);

}  // namespace pmsz
