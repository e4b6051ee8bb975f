#include <cmath>

#include "pmsz/simd/kernels.hpp"

namespace pmsz::simd {
namespace {

void shift(std::span<const double> src, double delta, std::span<double> dst) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] + delta;
}

void quantize(std::span<const double> src, double origin, double step,
              std::span<std::int64_t> codes) {
  for (std::size_t i = 0; i < src.size(); ++i)
    codes[i] = static_cast<std::int64_t>(std::nearbyint((src[i] - origin) / step));
}

void dequantize(std::span<const std::int64_t> codes, double origin, double step,
                std::span<double> dst) {
  for (std::size_t i = 0; i < codes.size(); ++i)
    dst[i] = origin + static_cast<double>(codes[i]) * step;
}

// Operand order mirrors MINPD/MAXPD so both variants agree on signed zeros.
std::size_t apply_clamped(std::span<double> g, std::span<const double> proposal,
                          std::span<const double> lower,
                          std::span<std::uint32_t> edit_counts) {
  std::size_t changed = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double t = proposal[i] < g[i] ? proposal[i] : g[i];
    t = t > lower[i] ? t : lower[i];
    if (t != g[i]) {
      g[i] = t;
      ++changed;
      if (!edit_counts.empty()) ++edit_counts[i];
    }
  }
  return changed;
}

std::size_t min_merge(std::span<double> dst, std::span<const double> src) {
  std::size_t changed = 0;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double t = src[i] < dst[i] ? src[i] : dst[i];
    if (t != dst[i]) {
      dst[i] = t;
      ++changed;
    }
  }
  return changed;
}

std::size_t count_outside(std::span<const double> v, std::span<const double> lo,
                          std::span<const double> hi) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) n += (v[i] < lo[i]) | (v[i] > hi[i]);
  return n;
}

std::size_t count_not_equal(std::span<const double> a, std::span<const double> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    m = d > m ? d : m;
  }
  return m;
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::Scalar, shift,         quantize,       dequantize,
                               apply_clamped, min_merge,   count_outside,
                               count_not_equal, max_abs_diff};
}  // namespace detail

}  // namespace pmsz::simd
