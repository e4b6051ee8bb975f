#include "pmsz/synth.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "pmsz/errors.hpp"

namespace pmsz {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

class Noise {
 public:
  explicit Noise(std::uint64_t& state) {
    std::array<std::uint8_t, 256> p;
    std::iota(p.begin(), p.end(), std::uint8_t{0});
    for (std::size_t i = 255; i > 0; --i) {
      const std::size_t j = splitmix64(state) % (i + 1);
      std::swap(p[i], p[j]);
    }
    for (std::size_t i = 0; i < 512; ++i) perm_[i] = p[i & 255];
  }

  double operator()(double x, double y, double z) const {
    const double fx = std::floor(x), fy = std::floor(y), fz = std::floor(z);
    const int X = static_cast<int>(fx) & 255, Y = static_cast<int>(fy) & 255,
              Z = static_cast<int>(fz) & 255;
    x -= fx;
    y -= fy;
    z -= fz;
    const double u = fade(x), v = fade(y), w = fade(z);
    const int A = perm_[X] + Y, AA = perm_[A] + Z, AB = perm_[A + 1] + Z;
    const int B = perm_[X + 1] + Y, BA = perm_[B] + Z, BB = perm_[B + 1] + Z;
    return lerp(w,
                lerp(v, lerp(u, grad(perm_[AA], x, y, z), grad(perm_[BA], x - 1, y, z)),
                     lerp(u, grad(perm_[AB], x, y - 1, z), grad(perm_[BB], x - 1, y - 1, z))),
                lerp(v,
                     lerp(u, grad(perm_[AA + 1], x, y, z - 1),
                          grad(perm_[BA + 1], x - 1, y, z - 1)),
                     lerp(u, grad(perm_[AB + 1], x, y - 1, z - 1),
                          grad(perm_[BB + 1], x - 1, y - 1, z - 1))));
  }

 private:
  static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
  static double lerp(double t, double a, double b) { return a + t * (b - a); }
  static double grad(int hash, double x, double y, double z) {
    const int h = hash & 15;
    const double u = h < 8 ? x : y;
    const double v = h < 4 ? y : (h == 12 || h == 14 ? x : z);
    return ((h & 1) == 0 ? u : -u) + ((h & 2) == 0 ? v : -v);
  }

  std::array<int, 512> perm_{};
};

}  // namespace

ScalarField perlin(const NoiseSpec& spec) {
  validate_dims(spec.dims);
  if (spec.octaves < 1) throw InputError("octaves must be >= 1");
  if (!(spec.frequency > 0.0) || !std::isfinite(spec.frequency))
    throw InputError("frequency must be positive");

  std::uint64_t state = spec.seed;
  const Noise noise(state);
  struct Octave {
    double freq, amp, ox, oy, oz;
  };
  std::vector<Octave> octaves;
  double freq = spec.frequency, amp = 1.0;
  for (unsigned o = 0; o < spec.octaves; ++o) {
    const double ox = 256.0 * unit(state), oy = 256.0 * unit(state), oz = 256.0 * unit(state);
    octaves.push_back({freq, amp, ox, oy, oz});
    freq *= 2.0;
    amp *= 0.5;
  }

  const Dims& d = spec.dims;
  std::vector<double> values(d.size());
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x) {
        double sum = 0.0;
        for (const Octave& o : octaves)
          sum += o.amp * noise(o.ox + o.freq * static_cast<double>(x) / static_cast<double>(d.nx),
                               o.oy + o.freq * static_cast<double>(y) / static_cast<double>(d.ny),
                               o.oz + o.freq * static_cast<double>(z) / static_cast<double>(d.nz));
        values[d.index(x, y, z)] = sum;
      }
  return ScalarField(d, std::move(values));
}

ScalarField ramp(const Dims& dims, double a, double b, double c) {
  validate_dims(dims);
  std::vector<double> values(dims.size());
  for (std::size_t z = 0; z < dims.nz; ++z)
    for (std::size_t y = 0; y < dims.ny; ++y)
      for (std::size_t x = 0; x < dims.nx; ++x)
        values[dims.index(x, y, z)] = a * static_cast<double>(x) + b * static_cast<double>(y) +
                                      c * static_cast<double>(z);
  return ScalarField(dims, std::move(values));
}

}  // namespace pmsz
