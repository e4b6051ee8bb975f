#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>
#include <cmath>

#include "pmsz/simd/kernels.hpp"

#define PMSZ_AVX2 __attribute__((target("avx2")))

namespace pmsz::simd {
namespace {

// 2^52: adding it to an integral double in [0, 2^52) leaves the integer in
// the low mantissa bits, which makes int64 <-> double exact without AVX-512.
constexpr double kMagic = 4503599627370496.0;
constexpr std::int64_t kMagicBits = 0x4330000000000000LL;

PMSZ_AVX2 void shift(std::span<const double> src, double delta, std::span<double> dst) {
  const std::size_t n = src.size();
  const __m256d d = _mm256_set1_pd(delta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst.data() + i, _mm256_add_pd(_mm256_loadu_pd(src.data() + i), d));
  for (; i < n; ++i) dst[i] = src[i] + delta;
}

PMSZ_AVX2 void quantize(std::span<const double> src, double origin, double step,
                        std::span<std::int64_t> codes) {
  const std::size_t n = src.size();
  const __m256d o = _mm256_set1_pd(origin);
  const __m256d s = _mm256_set1_pd(step);
  const __m256d magic = _mm256_set1_pd(kMagic);
  const __m256i magic_bits = _mm256_set1_epi64x(kMagicBits);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d q = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(src.data() + i), o), s);
    q = _mm256_round_pd(q, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256i bits = _mm256_castpd_si256(_mm256_add_pd(q, magic));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(codes.data() + i),
                        _mm256_sub_epi64(bits, magic_bits));
  }
  for (; i < n; ++i)
    codes[i] = static_cast<std::int64_t>(std::nearbyint((src[i] - origin) / step));
}

PMSZ_AVX2 void dequantize(std::span<const std::int64_t> codes, double origin, double step,
                          std::span<double> dst) {
  const std::size_t n = codes.size();
  const __m256d o = _mm256_set1_pd(origin);
  const __m256d s = _mm256_set1_pd(step);
  const __m256d magic = _mm256_set1_pd(kMagic);
  const __m256i magic_bits = _mm256_set1_epi64x(kMagicBits);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i c =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(codes.data() + i));
    const __m256d v = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(c, magic_bits)), magic);
    _mm256_storeu_pd(dst.data() + i, _mm256_add_pd(o, _mm256_mul_pd(v, s)));
  }
  for (; i < n; ++i) dst[i] = origin + static_cast<double>(codes[i]) * step;
}

PMSZ_AVX2 std::size_t apply_clamped(std::span<double> g, std::span<const double> proposal,
                                    std::span<const double> lower,
                                    std::span<std::uint32_t> edit_counts) {
  const std::size_t n = g.size();
  std::size_t changed = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cur = _mm256_loadu_pd(g.data() + i);
    __m256d t = _mm256_min_pd(_mm256_loadu_pd(proposal.data() + i), cur);
    t = _mm256_max_pd(t, _mm256_loadu_pd(lower.data() + i));
    const __m256d ne = _mm256_cmp_pd(t, cur, _CMP_NEQ_UQ);
    const unsigned mask = static_cast<unsigned>(_mm256_movemask_pd(ne));
    if (mask == 0) continue;
    _mm256_storeu_pd(g.data() + i, _mm256_blendv_pd(cur, t, ne));
    changed += static_cast<std::size_t>(std::popcount(mask));
    if (!edit_counts.empty())
      for (unsigned m = mask; m != 0; m &= m - 1) ++edit_counts[i + std::countr_zero(m)];
  }
  for (; i < n; ++i) {
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

PMSZ_AVX2 std::size_t min_merge(std::span<double> dst, std::span<const double> src) {
  const std::size_t n = dst.size();
  std::size_t changed = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cur = _mm256_loadu_pd(dst.data() + i);
    const __m256d t = _mm256_min_pd(_mm256_loadu_pd(src.data() + i), cur);
    const __m256d ne = _mm256_cmp_pd(t, cur, _CMP_NEQ_UQ);
    const unsigned mask = static_cast<unsigned>(_mm256_movemask_pd(ne));
    if (mask == 0) continue;
    _mm256_storeu_pd(dst.data() + i, _mm256_blendv_pd(cur, t, ne));
    changed += static_cast<std::size_t>(std::popcount(mask));
  }
  for (; i < n; ++i) {
    const double t = src[i] < dst[i] ? src[i] : dst[i];
    if (t != dst[i]) {
      dst[i] = t;
      ++changed;
    }
  }
  return changed;
}

PMSZ_AVX2 std::size_t count_outside(std::span<const double> v, std::span<const double> lo,
                                    std::span<const double> hi) {
  const std::size_t n = v.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v.data() + i);
    const __m256d below = _mm256_cmp_pd(x, _mm256_loadu_pd(lo.data() + i), _CMP_LT_OQ);
    const __m256d above = _mm256_cmp_pd(x, _mm256_loadu_pd(hi.data() + i), _CMP_GT_OQ);
    count += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(_mm256_movemask_pd(_mm256_or_pd(below, above)))));
  }
  for (; i < n; ++i) count += (v[i] < lo[i]) | (v[i] > hi[i]);
  return count;
}

PMSZ_AVX2 std::size_t count_not_equal(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ne = _mm256_cmp_pd(_mm256_loadu_pd(a.data() + i),
                                     _mm256_loadu_pd(b.data() + i), _CMP_NEQ_UQ);
    count += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(_mm256_movemask_pd(ne))));
  }
  for (; i < n; ++i) count += a[i] != b[i];
  return count;
}

PMSZ_AVX2 double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                                             _mm256_loadu_pd(b.data() + i)));
    acc = _mm256_max_pd(d, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = 0.0;
  for (double l : lanes) m = l > m ? l : m;
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    m = d > m ? d : m;
  }
  return m;
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Isa::Avx2,    shift,         quantize,       dequantize,
                             apply_clamped, min_merge,    count_outside,
                             count_not_equal, max_abs_diff};
}  // namespace detail

}  // namespace pmsz::simd

#endif
