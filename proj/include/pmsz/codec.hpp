#pragma once

// On-disk formats. Everything is little-endian with x-fastest ordering.
//
// Field / label volume:
//   "PMSZF\0" | version u8 = 1 | dtype u8 | ndims u8 (2|3) | dims u64[ndims] | data
//   dtype 1 = f32, 2 = f64, 3 = u64 vertex ids (label volumes only)
//
// Edit set:
//   "PMSZE\0" | version u8 = 1 | xi f64 | tau f64 | count u64 |
//   payload = id deltas as unsigned LEB128 varints, then count f64 values |
//   crc32(payload) u32
//
// Quantized payload:
//   "PMSZQ\0" | version u8 = 1 | ndims u8 | dims u64[ndims] | origin f64 |
//   xi f64 | bit_width u8 | codes packed LSB-first, ceil(n * bit_width / 8) bytes

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pmsz/compressor.hpp"
#include "pmsz/correction.hpp"
#include "pmsz/grid.hpp"

namespace pmsz {

using Bytes = std::vector<std::uint8_t>;

enum class DType : std::uint8_t { F32 = 1, F64 = 2, U64 = 3 };

inline constexpr std::uint8_t kFormatVersion = 1;

Bytes write_field(const ScalarField& field, DType dtype = DType::F64);
/// 32-bit data widens to double. Throws FormatError on any malformation.
ScalarField read_field(std::span<const std::uint8_t> bytes);

struct LabelVolume {
  Dims dims;
  std::vector<std::uint64_t> ids;
  friend bool operator==(const LabelVolume&, const LabelVolume&) = default;
};

Bytes write_labels(const Dims& dims, std::span<const VertexId> ids);
LabelVolume read_labels(std::span<const std::uint8_t> bytes);

struct DecodedEdits {
  EditSet edits;  // vertex_count is 0: the file does not record it
  double xi_abs = 0.0;
  double tau = 0.0;
};

Bytes encode_edits(const EditSet& edits, double xi_abs, double tau);
/// Validates CRC, id monotonicity and exact length.
DecodedEdits decode_edits(std::span<const std::uint8_t> bytes);

Bytes encode_payload(const QuantizedPayload& payload);
QuantizedPayload decode_payload(std::span<const std::uint8_t> bytes);
std::size_t payload_file_size(const Dims& dims, unsigned bit_width);

struct CompressionReport {
  std::size_t original_bytes = 0;
  std::size_t payload_bytes = 0;
  std::size_t edits_bytes = 0;
  double cr_base = 0.0;        // original / payload
  double cr_with_edits = 0.0;  // original / (payload + edits)
};

/// Throws InputError when original_bytes is zero.
CompressionReport compression_report(std::size_t original_bytes, std::size_t payload_bytes,
                                     std::size_t edits_bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pmsz
