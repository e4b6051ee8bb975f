#include "pmsz/codec.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string_view>

#include "pmsz/errors.hpp"

namespace pmsz {
namespace {

constexpr std::string_view kFieldMagic{"PMSZF\0", 6};
constexpr std::string_view kEditsMagic{"PMSZE\0", 6};
constexpr std::string_view kPayloadMagic{"PMSZQ\0", 6};

class Writer {
 public:
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  std::size_t size() const { return out_.size(); }
  Bytes& buffer() { return out_; }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) throw FormatError(std::string("truncated ") + what);
  }
  void magic(std::string_view m, const char* what) {
    need(m.size(), what);
    if (std::memcmp(in_.data() + pos_, m.data(), m.size()) != 0)
      throw FormatError(std::string("bad magic for ") + what);
    pos_ += m.size();
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return in_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::uint64_t varint(const char* what) {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = u8(what);
      if (shift == 63 && b > 1) throw FormatError(std::string("varint overflow in ") + what);
      v |= std::uint64_t{b & 0x7Fu} << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw FormatError(std::string("varint overflow in ") + what);
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::span<const std::uint8_t> slice(std::size_t from, std::size_t to) const {
    return in_.subspan(from, to - from);
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void put_dims(Writer& w, const Dims& d) {
  const bool flat = d.nz == 1;
  w.u8(flat ? 2 : 3);
  w.u64(d.nx);
  w.u64(d.ny);
  if (!flat) w.u64(d.nz);
}

Dims get_dims(Reader& r, const char* what) {
  const std::uint8_t ndims = r.u8(what);
  if (ndims != 2 && ndims != 3) throw FormatError(std::string("bad ndims in ") + what);
  Dims d;
  d.nx = r.u64(what);
  d.ny = r.u64(what);
  d.nz = ndims == 3 ? r.u64(what) : 1;
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
  if (d.nx > kLimit || d.ny > kLimit || d.nz > kLimit || d.size() > kLimit)
    throw FormatError(std::string("implausible dims in ") + what);
  try {
    validate_dims(d);
  } catch (const InputError& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
  return d;
}

void version(Reader& r, const char* what) {
  if (r.u8(what) != kFormatVersion) throw FormatError(std::string("unsupported version in ") + what);
}

}  // namespace

Bytes write_field(const ScalarField& field, DType dtype) {
  if (dtype == DType::U64) throw InputError("scalar fields are stored as f32 or f64");
  Writer w;
  w.bytes(kFieldMagic);
  w.u8(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(dtype));
  put_dims(w, field.dims());
  for (double v : field.values()) {
    if (dtype == DType::F64) {
      w.f64(v);
    } else {
      w.f32(static_cast<float>(v));
    }
  }
  return std::move(w.buffer());
}

ScalarField read_field(std::span<const std::uint8_t> bytes) {
  constexpr const char* what = "field file";
  Reader r(bytes);
  r.magic(kFieldMagic, what);
  version(r, what);
  const std::uint8_t code = r.u8(what);
  if (code == static_cast<std::uint8_t>(DType::U64))
    throw FormatError("file holds a label volume, not a scalar field");
  if (code != 1 && code != 2) throw FormatError("unknown dtype code in field file");
  const Dims dims = get_dims(r, what);
  const std::size_t width = code == 1 ? 4 : 8;
  if (r.remaining() != dims.size() * width)
    throw FormatError("field payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(dims.size() * width));
  std::vector<double> values(dims.size());
  for (double& v : values) v = code == 1 ? static_cast<double>(r.f32(what)) : r.f64(what);
  for (double v : values)
    if (!std::isfinite(v)) throw FormatError("field file contains non-finite values");
  return ScalarField(dims, std::move(values));
}

Bytes write_labels(const Dims& dims, std::span<const VertexId> ids) {
  validate_dims(dims);
  if (ids.size() != dims.size()) throw InputError("label count does not match dims");
  Writer w;
  w.bytes(kFieldMagic);
  w.u8(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(DType::U64));
  put_dims(w, dims);
  for (VertexId id : ids) w.u64(id);
  return std::move(w.buffer());
}

LabelVolume read_labels(std::span<const std::uint8_t> bytes) {
  constexpr const char* what = "label file";
  Reader r(bytes);
  r.magic(kFieldMagic, what);
  version(r, what);
  if (r.u8(what) != static_cast<std::uint8_t>(DType::U64))
    throw FormatError("label file must use dtype 3");
  LabelVolume out{get_dims(r, what), {}};
  if (r.remaining() != out.dims.size() * 8) throw FormatError("label payload has wrong length");
  out.ids.resize(out.dims.size());
  for (auto& id : out.ids) {
    id = r.u64(what);
    if (id >= out.dims.size()) throw FormatError("label id out of range");
  }
  return out;
}

Bytes encode_edits(const EditSet& edits, double xi_abs, double tau) {
  if (edits.ids.size() != edits.values.size())
    throw InputError("edit ids and values differ in length");
  Writer w;
  w.bytes(kEditsMagic);
  w.u8(kFormatVersion);
  w.f64(xi_abs);
  w.f64(tau);
  w.u64(edits.ids.size());
  const std::size_t payload_start = w.size();
  VertexId prev = 0;
  for (std::size_t k = 0; k < edits.ids.size(); ++k) {
    if (k > 0 && edits.ids[k] <= prev) throw InputError("edit ids must be strictly ascending");
    w.varint(edits.ids[k] - prev);
    prev = edits.ids[k];
  }
  for (double v : edits.values) w.f64(v);
  const Bytes& buf = w.buffer();
  w.u32(crc32(std::span(buf).subspan(payload_start)));
  return std::move(w.buffer());
}

DecodedEdits decode_edits(std::span<const std::uint8_t> bytes) {
  constexpr const char* what = "edits file";
  Reader r(bytes);
  r.magic(kEditsMagic, what);
  version(r, what);
  DecodedEdits out;
  out.xi_abs = r.f64(what);
  out.tau = r.f64(what);
  if (!(out.xi_abs > 0.0) || !std::isfinite(out.xi_abs) || !(out.tau > 0.0) ||
      !std::isfinite(out.tau))
    throw FormatError("edits file carries an invalid bound or decrement");
  const std::uint64_t count = r.u64(what);
  // Every edit needs at least one varint byte and eight value bytes.
  if (count > r.remaining() / 9) throw FormatError("edit count exceeds file size");
  const std::size_t payload_start = r.pos();
  out.edits.ids.reserve(count);
  out.edits.values.reserve(count);
  std::uint64_t prev = 0;
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t delta = r.varint(what);
    if (k > 0 && delta == 0) throw FormatError("edit ids are not strictly ascending");
    if (delta > std::numeric_limits<std::uint64_t>::max() - prev)
      throw FormatError("edit id overflows");
    prev += delta;
    out.edits.ids.push_back(prev);
  }
  for (std::uint64_t k = 0; k < count; ++k) {
    const double v = r.f64(what);
    if (!std::isfinite(v)) throw FormatError("edit value is not finite");
    out.edits.values.push_back(v);
  }
  const std::size_t payload_end = r.pos();
  const std::uint32_t stored = r.u32(what);
  if (r.remaining() != 0) throw FormatError("trailing bytes after edits CRC");
  if (crc32(r.slice(payload_start, payload_end)) != stored)
    throw FormatError("edits CRC mismatch");
  return out;
}

std::size_t payload_file_size(const Dims& dims, unsigned bit_width) {
  const std::size_t header = 6 + 1 + 1 + 8 * (dims.nz == 1 ? 2 : 3) + 8 + 8 + 1;
  return header + (dims.size() * bit_width + 7) / 8;
}

Bytes encode_payload(const QuantizedPayload& p) {
  if (p.bit_width < 1 || p.bit_width > 52) throw InputError("bit width must be in [1, 52]");
  if (p.codes.size() != p.dims.size()) throw InputError("code count does not match dims");
  Writer w;
  w.bytes(kPayloadMagic);
  w.u8(kFormatVersion);
  put_dims(w, p.dims);
  w.f64(p.origin);
  w.f64(p.xi_abs);
  w.u8(static_cast<std::uint8_t>(p.bit_width));
  Bytes& out = w.buffer();
  const std::size_t base = out.size();
  out.resize(base + (p.codes.size() * p.bit_width + 7) / 8, 0);
  std::size_t bit = 0;
  for (std::int64_t code : p.codes) {
    const auto c = static_cast<std::uint64_t>(code);
    if (code < 0 || (c >> p.bit_width) != 0) throw InputError("code does not fit its bit width");
    for (unsigned b = 0; b < p.bit_width; ++b, ++bit)
      if ((c >> b) & 1u) out[base + bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
  }
  return std::move(out);
}

QuantizedPayload decode_payload(std::span<const std::uint8_t> bytes) {
  constexpr const char* what = "payload file";
  Reader r(bytes);
  r.magic(kPayloadMagic, what);
  version(r, what);
  QuantizedPayload p;
  p.dims = get_dims(r, what);
  p.origin = r.f64(what);
  p.xi_abs = r.f64(what);
  p.bit_width = r.u8(what);
  if (p.bit_width < 1 || p.bit_width > 52) throw FormatError("payload bit width out of range");
  const std::size_t packed = (p.dims.size() * p.bit_width + 7) / 8;
  if (r.remaining() != packed)
    throw FormatError("payload codes are " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(packed));
  const auto data = r.slice(r.pos(), r.pos() + packed);
  p.codes.resize(p.dims.size());
  std::size_t bit = 0;
  for (auto& code : p.codes) {
    std::uint64_t c = 0;
    for (unsigned b = 0; b < p.bit_width; ++b, ++bit)
      c |= std::uint64_t{(data[bit / 8] >> (bit % 8)) & 1u} << b;
    code = static_cast<std::int64_t>(c);
  }
  p.payload_bytes = bytes.size();
  return p;
}

CompressionReport compression_report(std::size_t original_bytes, std::size_t payload_bytes,
                                     std::size_t edits_bytes) {
  if (original_bytes == 0) throw InputError("original size must be positive");
  if (payload_bytes + edits_bytes == 0) throw InputError("compressed size must be positive");
  CompressionReport r{original_bytes, payload_bytes, edits_bytes, 0.0, 0.0};
  r.cr_base = payload_bytes == 0 ? std::numeric_limits<double>::infinity()
                                 : static_cast<double>(original_bytes) / payload_bytes;
  r.cr_with_edits = static_cast<double>(original_bytes) / (payload_bytes + edits_bytes);
  return r;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = std::size_t{1} << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t len = std::min(kChunk, bytes.size() - off);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("short write to " + path.string());
}

}  // namespace pmsz
