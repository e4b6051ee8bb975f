#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "pmsz/errors.hpp"
#include "pmsz/grid.hpp"

using namespace pmsz;

TEST_CASE("neighbors: stencil sizes and clipping") {
  const Dims d2{3, 3, 1};
  CHECK(neighbors(d2, d2.index(1, 1)).size() == 6);
  const auto corner = neighbors(d2, d2.index(0, 0));
  CHECK(corner == std::vector<VertexId>{d2.index(1, 0), d2.index(0, 1), d2.index(1, 1)});
  const Dims d3{3, 3, 3};
  CHECK(neighbors(d3, d3.index(1, 1, 1)).size() == 14);
  CHECK_THROWS_AS(neighbors(d2, 9), InputError);
}

TEST_CASE("neighbors: enumeration order follows the stencil table") {
  const Dims d{4, 4, 4};
  const VertexId v = d.index(1, 2, 1);
  const auto n = neighbors(d, v);
  REQUIRE(n.size() == 14);
  for (std::size_t k = 0; k < 14; ++k) {
    const Offset& o = kStencil[k];
    CHECK(n[k] == d.index(1 + o.dx, 2 + o.dy, 1 + o.dz));
  }
}

TEST_CASE("neighbors: equals the brute-force edge set on many shapes") {
  for (const Dims& d : {Dims{5, 4, 1}, Dims{3, 4, 5}, Dims{1, 4, 3}, Dims{4, 1, 3}, Dims{2, 2, 2},
                        Dims{7, 1, 2}}) {
    for (VertexId v = 0; v < d.size(); ++v) {
      auto got = neighbors(d, v);
      CHECK(std::find(got.begin(), got.end(), v) == got.end());
      std::sort(got.begin(), got.end());
      CHECK(std::adjacent_find(got.begin(), got.end()) == got.end());
      CHECK(got == oracle::edges(d, v));
    }
  }
}

TEST_CASE("neighbors: symmetric and deterministic") {
  const Dims d{4, 3, 3};
  for (VertexId i = 0; i < d.size(); ++i) {
    CHECK(neighbors(d, i) == neighbors(d, i));
    for (VertexId j : neighbors(d, i)) {
      const auto back = neighbors(d, j);
      CHECK(std::find(back.begin(), back.end(), i) != back.end());
    }
  }
}

TEST_CASE("stencil visit agrees with neighbors at every vertex") {
  const Dims d{6, 5, 4};
  const Stencil s(d);
  for (VertexId v = 0; v < d.size(); ++v) {
    std::vector<VertexId> got;
    s.visit(v, [&](VertexId j) { got.push_back(j); });
    CHECK(got == neighbors(d, v));
  }
}

TEST_CASE("dims validation and parsing") {
  CHECK_NOTHROW(validate_dims({2, 2, 1}));
  CHECK_NOTHROW(validate_dims({1, 3, 3}));
  CHECK_THROWS_AS(validate_dims({5, 1, 1}), InputError);
  CHECK_THROWS_AS(validate_dims({0, 4, 4}), InputError);
  CHECK(parse_dims("16x8") == Dims{16, 8, 1});
  CHECK(parse_dims("4x5x6") == Dims{4, 5, 6});
  CHECK(parse_dims("1x1x1") == Dims{1, 1, 1});
  CHECK_THROWS_AS(parse_dims("4x"), InputError);
  CHECK_THROWS_AS(parse_dims("4x5x6x7"), InputError);
  CHECK_THROWS_AS(parse_dims("ax5"), InputError);
}

TEST_CASE("vertex ids round-trip through coordinates") {
  const Dims d{3, 4, 5};
  for (VertexId v = 0; v < d.size(); ++v) {
    const Coord c = d.coord(v);
    CHECK(c.x + 3 * (c.y + 4 * c.z) == v);
    CHECK(d.index(c) == v);
  }
}

TEST_CASE("scalar field validation") {
  CHECK_THROWS_AS(ScalarField({2, 2, 1}, {1, 2, 3}), InputError);
  CHECK_THROWS_AS(ScalarField({2, 2, 1}, {1, 2, 3, std::nan("")}), InputError);
  CHECK_THROWS_AS(ScalarField({2, 2, 1}, {1, 2, 3, std::numeric_limits<double>::infinity()}),
                  InputError);
  CHECK_THROWS_AS(ScalarField({4, 1, 1}, {1, 2, 3, 4}), InputError);
  const auto c = ScalarField::filled({2, 3, 1}, 1.5);
  CHECK(c.size() == 6);
  CHECK(c[5] == 1.5);
}

TEST_CASE("precedes: examples") {
  std::vector<double> v(8, 0.0);
  v[0] = 1.0;
  v[1] = 2.0;
  v[3] = 5.0;
  v[7] = 5.0;
  const ScalarField f({4, 2, 1}, v);
  CHECK(precedes(f, 0, 1));
  CHECK_FALSE(precedes(f, 1, 0));
  CHECK(precedes(f, 3, 7));
  CHECK_FALSE(precedes(f, 7, 3));
  CHECK_THROWS_AS(precedes(f, 2, 2), InputError);
  CHECK_THROWS_AS(precedes(f, 2, 8), InputError);
}

TEST_CASE("precedes: strict total order on plateau-heavy fields") {
  std::mt19937_64 rng(11);
  const auto f = oracle::random_field(rng, {5, 5, 1}, 3);
  for (VertexId i = 0; i < f.size(); ++i)
    for (VertexId j = 0; j < f.size(); ++j) {
      if (i == j) continue;
      CHECK(precedes(f, i, j) != precedes(f, j, i));
      CHECK(precedes(f, i, j) == (OrderKey{f[i], i} < OrderKey{f[j], j}));
      for (VertexId k = 0; k < f.size(); k += 7)
        if (k != i && k != j && precedes(f, i, j) && precedes(f, j, k)) CHECK(precedes(f, i, k));
    }
}
