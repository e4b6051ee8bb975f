#pragma once

// Uniform scalar quantizer with a hard absolute error bound. Stands in for
// an external error-bounded compressor; decompressed fields from other
// tools are read through codec.hpp instead.

#include <cstdint>
#include <vector>

#include "pmsz/grid.hpp"

namespace pmsz {

struct QuantizedPayload {
  Dims dims;
  double xi_abs = 0.0;
  double origin = 0.0;
  std::vector<std::int64_t> codes;  // bin index per vertex, >= 0
  unsigned bit_width = 1;
  std::size_t payload_bytes = 0;  // serialized size, header included

  double step() const noexcept { return 2.0 * xi_abs; }
};

struct Quantized {
  QuantizedPayload payload;
  ScalarField reconstructed;
};

/// code = round((f - min f) / (2 xi)), reconstruction origin + code * 2 xi.
/// Codes whose reconstruction misses the bound by a rounding ulp are nudged
/// to a neighboring bin, so |f - f_hat| <= xi and f - xi <= f_hat <= f + xi
/// hold exactly in floating point.
Quantized quantize(const ScalarField& field, double xi_abs);

/// Throws FormatError when the payload is inconsistent.
ScalarField reconstruct(const QuantizedPayload& payload);

/// eb_rel * (max - min); eb_rel * |max| for constant fields.
double relative_to_absolute(const ScalarField& field, double eb_rel);

}  // namespace pmsz
