#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "pmsz/codec.hpp"
#include "pmsz/compressor.hpp"
#include "pmsz/errors.hpp"
#include "pmsz/synth.hpp"

using namespace pmsz;

namespace {

Bytes fixture(const char* name) {
  return read_file(std::filesystem::path(PMSZ_FIXTURES) / name);
}

double read_f64(const Bytes& b, std::size_t at) {
  double v;
  std::memcpy(&v, b.data() + at, 8);
  return v;
}

std::uint64_t read_u64(const Bytes& b, std::size_t at) {
  std::uint64_t v;
  std::memcpy(&v, b.data() + at, 8);
  return v;
}

}  // namespace

TEST_CASE("field header layout for a 3x3 grid") {
  const auto bytes = write_field(ramp({3, 3, 1}, 1, 3));
  REQUIRE(bytes.size() == 6 + 3 + 2 * 8 + 9 * 8);
  CHECK(std::memcmp(bytes.data(), "PMSZF\0", 6) == 0);
  CHECK(bytes[6] == 1);
  CHECK(bytes[7] == 2);
  CHECK(bytes[8] == 2);
  CHECK(read_u64(bytes, 9) == 3);
  CHECK(read_u64(bytes, 17) == 3);
  CHECK(read_f64(bytes, 25 + 8 * 4) == 4.0);  // vertex (1,1)
}

TEST_CASE("field round trips, f64 exact and f32 widened") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto f = oracle::random_field(rng, oracle::random_dims(rng, 9));
    CHECK(read_field(write_field(f)) == f);
    const auto narrow = read_field(write_field(f, DType::F32));
    REQUIRE(narrow.dims() == f.dims());
    for (VertexId i = 0; i < f.size(); ++i)
      CHECK(narrow[i] == static_cast<double>(static_cast<float>(f[i])));
  }
  CHECK_THROWS_AS(write_field(ramp({2, 2, 1}, 1, 1), DType::U64), InputError);
}

TEST_CASE("golden field files decode and re-encode byte for byte") {
  const auto b64 = fixture("field_3x3_f64.bin");
  const auto f = read_field(b64);
  CHECK(f.dims() == Dims{3, 3, 1});
  for (VertexId i = 0; i < 9; ++i) CHECK(f[i] == 0.5 * i - 1.25);
  CHECK(write_field(f) == b64);

  const auto b32 = fixture("field_4x3x2_f32.bin");
  const auto g = read_field(b32);
  CHECK(g.dims() == Dims{4, 3, 2});
  for (VertexId i = 0; i < 24; ++i) CHECK(g[i] == (i % 2 ? -0.25 : 0.25) * i);
  CHECK(write_field(g, DType::F32) == b32);
}

TEST_CASE("field decoding rejects malformed input") {
  const auto good = fixture("field_3x3_f64.bin");
  for (std::size_t cut : {0ul, 5ul, 8ul, 20ul, good.size() - 1}) {
    const Bytes b(good.begin(), good.begin() + static_cast<long>(cut));
    CHECK_THROWS_AS(read_field(b), FormatError);
  }
  auto b = good;
  b.push_back(0);
  CHECK_THROWS_AS(read_field(b), FormatError);
  b = good;
  b[0] = 'X';
  CHECK_THROWS_AS(read_field(b), FormatError);
  b = good;
  b[6] = 2;
  CHECK_THROWS_AS(read_field(b), FormatError);
  b = good;
  b[7] = 9;
  CHECK_THROWS_AS(read_field(b), FormatError);
  b = good;
  b[8] = 4;
  CHECK_THROWS_AS(read_field(b), FormatError);
  CHECK_THROWS_AS(read_field(fixture("labels_3x3.bin")), FormatError);
}

TEST_CASE("edits: varint example and empty set") {
  const EditSet e{{5, 9}, {1.0, 2.0}, 0};
  const auto b = encode_edits(e, 0.5, 0.25);
  const std::size_t head = 6 + 1 + 8 + 8 + 8;
  REQUIRE(b.size() == head + 2 + 16 + 4);
  CHECK(b[head] == 5);
  CHECK(b[head + 1] == 4);
  CHECK(read_u64(b, 23) == 2);
  const auto d = decode_edits(b);
  CHECK(d.edits == e);
  CHECK(d.xi_abs == 0.5);
  CHECK(d.tau == 0.25);

  const auto empty = encode_edits(EditSet{}, 0.1, 0.1 / 1024);
  CHECK(empty.size() == head + 4);
  CHECK(decode_edits(empty).edits.size() == 0);
  CHECK(empty == fixture("edits_empty.bin"));
}

TEST_CASE("edits: golden file") {
  const auto b = fixture("edits_small.bin");
  const auto d = decode_edits(b);
  CHECK(d.edits.ids == std::vector<VertexId>{5, 9, 300});
  CHECK(d.edits.values == std::vector<double>{1.0, 2.0, -0.125});
  CHECK(d.xi_abs == 0.5);
  CHECK(d.tau == 0.5 / 1024);
  CHECK(encode_edits(d.edits, d.xi_abs, d.tau) == b);
  CHECK(crc32(std::span(b).subspan(31, b.size() - 35)) ==
        (b[b.size() - 4] | b[b.size() - 3] << 8 | b[b.size() - 2] << 16 |
         static_cast<std::uint32_t>(b[b.size() - 1]) << 24));
}

TEST_CASE("edits: random round trips") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    EditSet e;
    VertexId id = 0;
    const int n = static_cast<int>(rng() % 200);
    for (int k = 0; k < n; ++k) {
      id += 1 + rng() % (k % 7 == 0 ? 1u << 20 : 40u);
      e.ids.push_back(id);
      e.values.push_back(std::ldexp(static_cast<double>(rng() % 100000) - 50000.0, -9));
    }
    CHECK(decode_edits(encode_edits(e, 0.3, 0.001)).edits == e);
  }
}

TEST_CASE("edits: corruption and bad input") {
  const auto good = fixture("edits_small.bin");
  // xi and tau sit outside the checksum; a flipped mantissa bit there is
  // still a valid header.
  for (std::size_t at = 0; at < good.size(); ++at) {
    if (at >= 7 && at < 23) continue;
    auto b = good;
    b[at] ^= 0x10;
    CHECK_THROWS_AS(decode_edits(b), FormatError);
  }
  for (std::size_t cut = 0; cut < good.size(); ++cut) {
    const Bytes b(good.begin(), good.begin() + static_cast<long>(cut));
    CHECK_THROWS_AS(decode_edits(b), FormatError);
  }
  auto b = good;
  b[14] = 0xFF;  // xi becomes NaN
  CHECK_THROWS_AS(decode_edits(b), FormatError);
  CHECK_THROWS_AS(encode_edits(EditSet{{9, 5}, {1.0, 2.0}, 0}, 0.5, 0.1), InputError);
  CHECK_THROWS_AS(encode_edits(EditSet{{5, 5}, {1.0, 2.0}, 0}, 0.5, 0.1), InputError);
  CHECK_THROWS_AS(encode_edits(EditSet{{5}, {1.0, 2.0}, 0}, 0.5, 0.1), InputError);
}

TEST_CASE("labels: golden file and round trip") {
  const auto b = fixture("labels_3x3.bin");
  const auto l = read_labels(b);
  CHECK(l.dims == Dims{3, 3, 1});
  CHECK(l.ids == std::vector<std::uint64_t>{0, 0, 2, 0, 4, 2, 6, 4, 8});
  const std::vector<VertexId> ids(l.ids.begin(), l.ids.end());
  CHECK(write_labels(l.dims, ids) == b);

  auto bad = b;
  bad[bad.size() - 8] = 9;  // id 9 on a 9-vertex grid
  CHECK_THROWS_AS(read_labels(bad), FormatError);
  CHECK_THROWS_AS(read_labels(fixture("field_3x3_f64.bin")), FormatError);
}

TEST_CASE("payload: golden file") {
  const auto b = fixture("payload_3x2.bin");
  const auto p = decode_payload(b);
  CHECK(p.dims == Dims{3, 2, 1});
  CHECK(p.origin == -1.0);
  CHECK(p.xi_abs == 0.25);
  CHECK(p.bit_width == 3);
  CHECK(p.codes == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5});
  CHECK(p.payload_bytes == b.size());
  CHECK(payload_file_size(p.dims, 3) == b.size());
  CHECK(encode_payload(p) == b);
  const auto r = reconstruct(p);
  for (VertexId i = 0; i < 6; ++i) CHECK(r[i] == -1.0 + 0.5 * i);
}

TEST_CASE("payload: quantizer output round trips") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto f = perlin({seed, 4.0, 3, {12, 10, 6}});
    const auto q = quantize(f, relative_to_absolute(f, 1e-3));
    const auto b = encode_payload(q.payload);
    CHECK(b.size() == q.payload.payload_bytes);
    const auto p = decode_payload(b);
    CHECK(p.codes == q.payload.codes);
    CHECK(reconstruct(p) == q.reconstructed);
  }
  auto b = fixture("payload_3x2.bin");
  b.pop_back();
  CHECK_THROWS_AS(decode_payload(b), FormatError);
  b = fixture("payload_3x2.bin");
  b[b.size() - 4] = 0;  // bit width 0
  CHECK_THROWS_AS(decode_payload(b), FormatError);
}

TEST_CASE("compression_report: examples") {
  const auto a = compression_report(1000, 100, 0);
  CHECK(a.cr_base == 10.0);
  CHECK(a.cr_with_edits == 10.0);
  const auto b = compression_report(1000, 100, 100);
  CHECK(b.cr_base == 10.0);
  CHECK(b.cr_with_edits == 5.0);
  CHECK_THROWS_AS(compression_report(0, 100, 0), InputError);
}
