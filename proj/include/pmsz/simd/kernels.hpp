#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference and, on
// x86-64, an AVX2 variant; the active table is picked once at startup from
// CPUID, or from PMSZ_ISA=scalar|avx2 when set. Variants must agree bit for
// bit, which the kernel tests check on random inputs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace pmsz::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  /// dst[i] = src[i] + delta
  void (*shift)(std::span<const double> src, double delta, std::span<double> dst);

  /// codes[i] = nearbyint((src[i] - origin) / step). Results must lie in
  /// [0, 2^52); the caller guarantees it.
  void (*quantize)(std::span<const double> src, double origin, double step,
                   std::span<std::int64_t> codes);

  /// dst[i] = origin + double(codes[i]) * step, codes in [0, 2^52).
  void (*dequantize)(std::span<const std::int64_t> codes, double origin, double step,
                     std::span<double> dst);

  /// g[i] <- max(min(g[i], proposal[i]), lower[i]), written only where the
  /// value changes. Bumps edit_counts[i] on change (may be empty). Returns
  /// the number of changed entries.
  std::size_t (*apply_clamped)(std::span<double> g, std::span<const double> proposal,
                               std::span<const double> lower,
                               std::span<std::uint32_t> edit_counts);

  /// dst[i] <- min(dst[i], src[i]). Returns the number of changed entries.
  std::size_t (*min_merge)(std::span<double> dst, std::span<const double> src);

  /// Number of i with v[i] < lo[i] or v[i] > hi[i].
  std::size_t (*count_outside)(std::span<const double> v, std::span<const double> lo,
                               std::span<const double> hi);

  /// Number of i with a[i] != b[i].
  std::size_t (*count_not_equal)(std::span<const double> a, std::span<const double> b);

  /// max |a[i] - b[i]|, 0 for empty input.
  double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);
};

/// Table chosen for this process.
const KernelTable& kernels();

/// Table for a specific ISA, or nullptr when the CPU or build lacks it.
const KernelTable* kernels_for(Isa isa);

/// Highest ISA usable on this machine.
Isa detect_isa() noexcept;

namespace detail {
extern const KernelTable kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace pmsz::simd
