#include "pmsz/compressor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pmsz/codec.hpp"
#include "pmsz/errors.hpp"
#include "pmsz/simd/kernels.hpp"

namespace pmsz {
namespace {

constexpr double kMaxCode = 4503599627370496.0 / 2;  // 2^51, leaves room for +1 nudges

bool within(double f, double r, double xi) {
  return std::fabs(f - r) <= xi && r >= f - xi && r <= f + xi;
}

unsigned width_for(std::int64_t max_code) {
  return std::max(1u, static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(max_code))));
}

}  // namespace

Quantized quantize(const ScalarField& field, double xi_abs) {
  if (!(xi_abs > 0.0) || !std::isfinite(xi_abs))
    throw InputError("absolute error bound must be positive and finite");
  const auto f = field.values();
  const auto [lo_it, hi_it] = std::minmax_element(f.begin(), f.end());
  const double origin = *lo_it;
  const double step = 2.0 * xi_abs;
  if (!std::isfinite(step) || !((*hi_it - origin) / step < kMaxCode))
    throw InputError("error bound too small for the value range");

  const auto& k = simd::kernels();
  const std::size_t n = field.size();
  QuantizedPayload payload{field.dims(), xi_abs, origin, std::vector<std::int64_t>(n), 1, 0};
  std::vector<double> rec(n);
  k.quantize(f, origin, step, payload.codes);
  k.dequantize(payload.codes, origin, step, rec);

  std::vector<double> lo(n), hi(n);
  k.shift(f, -xi_abs, lo);
  k.shift(f, xi_abs, hi);
  if (k.count_outside(rec, lo, hi) != 0 || k.max_abs_diff(f, rec) > xi_abs) {
    for (std::size_t i = 0; i < n; ++i) {
      if (within(f[i], rec[i], xi_abs)) continue;
      bool fixed = false;
      for (std::int64_t d : {-1, 1}) {
        const std::int64_t c = payload.codes[i] + d;
        if (c < 0) continue;
        const double r = origin + static_cast<double>(c) * step;
        if (within(f[i], r, xi_abs)) {
          payload.codes[i] = c;
          rec[i] = r;
          fixed = true;
          break;
        }
      }
      if (!fixed)
        throw InternalError("quantizer cannot honor the bound at vertex " + std::to_string(i));
    }
  }

  payload.bit_width = width_for(*std::max_element(payload.codes.begin(), payload.codes.end()));
  payload.payload_bytes = payload_file_size(payload.dims, payload.bit_width);
  return {std::move(payload), ScalarField(field.dims(), std::move(rec))};
}

ScalarField reconstruct(const QuantizedPayload& payload) {
  validate_dims(payload.dims);
  if (payload.codes.size() != payload.dims.size())
    throw FormatError("payload has " + std::to_string(payload.codes.size()) + " codes for " +
                      std::to_string(payload.dims.size()) + " vertices");
  if (!(payload.xi_abs > 0.0) || !std::isfinite(payload.xi_abs) ||
      !std::isfinite(payload.origin))
    throw FormatError("payload carries an invalid bound or origin");
  if (payload.bit_width < 1 || payload.bit_width > 52)
    throw FormatError("payload bit width out of range");
  const auto limit = std::int64_t{1} << payload.bit_width;
  for (std::int64_t c : payload.codes)
    if (c < 0 || c >= limit) throw FormatError("payload code exceeds its bit width");
  std::vector<double> out(payload.codes.size());
  simd::kernels().dequantize(payload.codes, payload.origin, payload.step(), out);
  // Quantize may have nudged a code; the plain formula reproduces it either way.
  for (double v : out)
    if (!std::isfinite(v)) throw FormatError("payload reconstructs to non-finite values");
  return ScalarField(payload.dims, std::move(out));
}

double relative_to_absolute(const ScalarField& field, double eb_rel) {
  if (!(eb_rel > 0.0) || !std::isfinite(eb_rel))
    throw InputError("relative error bound must be positive and finite");
  const auto f = field.values();
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const double range = *hi - *lo;
  const double xi = range > 0.0 ? eb_rel * range : eb_rel * std::fabs(*hi);
  if (!(xi > 0.0)) throw InputError("relative bound of an all-zero field is undefined");
  return xi;
}

}  // namespace pmsz
