#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pmsz/compressor.hpp"
#include "pmsz/errors.hpp"
#include "pmsz/synth.hpp"
#include "pmsz/topology.hpp"

using namespace pmsz;

namespace {

const Dims k3x3{3, 3, 1};

ScalarField ramp3() { return ramp(k3x3, 1.0, 3.0); }

void check_against_oracle(const ScalarField& ref, const ScalarField& test) {
  const DistortionReport r = compare_plmss(ref, test);
  const oracle::Report o = oracle::compare(ref, test);
  CHECK(r.fp_max == o.fp_max);
  CHECK(r.fn_max == o.fn_max);
  CHECK(r.fp_min == o.fp_min);
  CHECK(r.fn_min == o.fn_min);
  CHECK(r.asc_order_violations == o.asc);
  CHECK(r.desc_order_violations == o.desc);
  CHECK(r.wrong_label_count == o.wrong);
}

}  // namespace

TEST_CASE("extreme_neighbor: examples") {
  const auto f = ramp3();
  const VertexId c = k3x3.index(1, 1);
  CHECK(extreme_neighbor(f, c, Direction::Ascending) == k3x3.index(2, 2));
  CHECK(extreme_neighbor(f, c, Direction::Descending) == k3x3.index(0, 0));
  const auto flat = ScalarField::filled(k3x3, 0.0);
  CHECK(extreme_neighbor(flat, c, Direction::Ascending) == k3x3.index(2, 2));
  CHECK(extreme_neighbor(flat, c, Direction::Descending) == k3x3.index(0, 0));
  CHECK_THROWS_AS(extreme_neighbor(f, 9, Direction::Ascending), InputError);
}

TEST_CASE("extreme_neighbor: defined at extrema too") {
  const auto f = ramp3();
  CHECK(extreme_neighbor(f, 8, Direction::Ascending) == k3x3.index(1, 2));
  CHECK(extreme_neighbor(f, 0, Direction::Descending) == k3x3.index(1, 0));
}

TEST_CASE("find_extrema: examples") {
  const auto e = find_extrema(ramp3());
  CHECK(e.maxima == std::vector<VertexId>{8});
  CHECK(e.minima == std::vector<VertexId>{0});
  const auto flat = find_extrema(ScalarField::filled(k3x3, 3.0));
  CHECK(flat.maxima == std::vector<VertexId>{8});
  CHECK(flat.minima == std::vector<VertexId>{0});
}

TEST_CASE("find_extrema: Perlin 16x16 matches brute force") {
  const auto f = perlin({3, 4.0, 3, {16, 16, 1}});
  const auto e = find_extrema(f);
  const auto o = oracle::extrema(f);
  CHECK(e.maxima == o.maxima);
  CHECK(e.minima == o.minima);
  CHECK(e.maxima.size() > 1);
}

TEST_CASE("find_extrema: random plateau fields match brute force") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto f = oracle::random_field(rng, oracle::random_dims(rng, 7), t % 2 ? 3 : 0);
    const auto e = find_extrema(f);
    const auto o = oracle::extrema(f);
    CHECK(e.maxima == o.maxima);
    CHECK(e.minima == o.minima);
  }
}

TEST_CASE("neighbor_extremes agrees with the oracle") {
  std::mt19937_64 rng(9);
  const auto f = oracle::random_field(rng, {5, 4, 3}, 4);
  const auto n = neighbor_extremes(f);
  const auto v = oracle::values(f);
  for (VertexId i = 0; i < f.size(); ++i) {
    CHECK(n.largest[i] == oracle::largest(f.dims(), v, i));
    CHECK(n.smallest[i] == oracle::smallest(f.dims(), v, i));
  }
}

TEST_CASE("segmentation: ramp is one basin, extrema label themselves") {
  const auto l = compute_segmentation(ramp3());
  for (VertexId i = 0; i < 9; ++i) {
    CHECK(l.asc_target[i] == 0);
    CHECK(l.desc_target[i] == 8);
  }
  const auto f = perlin({1, 4.0, 2, {12, 12, 1}});
  const auto s = compute_segmentation(f);
  const auto e = find_extrema(f);
  for (VertexId m : e.maxima) CHECK(s.desc_target[m] == m);
  for (VertexId m : e.minima) CHECK(s.asc_target[m] == m);
}

TEST_CASE("segmentation: Perlin 8^3 pointer jumping equals naive walk") {
  const auto f = perlin({8, 4.0, 3, {8, 8, 8}});
  CHECK(compute_segmentation(f) == compute_segmentation_naive(f));
}

TEST_CASE("segmentation: 100 random fields against both references") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const Dims d = oracle::random_dims(rng, 9);
    const auto f = oracle::random_field(rng, d, t % 3 == 0 ? 2 : 0);
    const auto fast = compute_segmentation(f);
    CHECK(fast == compute_segmentation_naive(f));
    const auto o = oracle::segmentation(f);
    CHECK(fast.asc_target == o.asc);
    CHECK(fast.desc_target == o.desc);
  }
}

TEST_CASE("segmentation: labels are extrema and paths are monotone") {
  std::mt19937_64 rng(23);
  const auto f = oracle::random_field(rng, {6, 5, 4}, 3);
  const auto l = compute_segmentation(f);
  const auto e = find_extrema(f);
  const auto n = neighbor_extremes(f);
  for (VertexId i = 0; i < f.size(); ++i) {
    CHECK(std::binary_search(e.minima.begin(), e.minima.end(), l.asc_target[i]));
    CHECK(std::binary_search(e.maxima.begin(), e.maxima.end(), l.desc_target[i]));
    std::size_t steps = 0;
    VertexId u = i;
    while (!std::binary_search(e.maxima.begin(), e.maxima.end(), u)) {
      REQUIRE(precedes(f, u, n.largest[u]));
      u = n.largest[u];
      REQUIRE(++steps < f.size());
    }
    CHECK(u == l.desc_target[i]);
  }
}

TEST_CASE("compare_plmss: identity is all zero") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto f = oracle::random_field(rng, oracle::random_dims(rng, 8), t % 2 ? 4 : 0);
    CHECK(compare_plmss(f, f).all_zero());
  }
}

TEST_CASE("compare_plmss: raised ramp center") {
  const auto f = ramp3();
  auto v = oracle::values(f);
  v[4] = 100.0;
  const ScalarField g(k3x3, v);
  const auto r = compare_plmss(f, g);
  CHECK(r.fp_max == std::vector<VertexId>{4});
  CHECK(r.fn_max == std::vector<VertexId>{8});
  CHECK(r.fp_min.empty());
  CHECK(r.fn_min.empty());
  check_against_oracle(f, g);
}

TEST_CASE("compare_plmss: Perlin 16^3 against its quantized version") {
  const auto f = perlin({42, 4.0, 3, {16, 16, 16}});
  const auto q = quantize(f, relative_to_absolute(f, 1e-2));
  const auto r = compare_plmss(f, q.reconstructed);
  CHECK(r.total() > 0);
  check_against_oracle(f, q.reconstructed);
}

TEST_CASE("compare_plmss: random pairs against the oracle") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 30; ++t) {
    const Dims d = oracle::random_dims(rng, 7);
    check_against_oracle(oracle::random_field(rng, d, 3), oracle::random_field(rng, d));
  }
}

TEST_CASE("compare_plmss: dims mismatch") {
  CHECK_THROWS_AS(compare_plmss(ramp3(), ramp({3, 4, 1}, 1, 1)), InputError);
}
