#pragma once

// Brute-force reference implementations for tests. Deliberately written
// from the definitions, sharing nothing with the library beyond ScalarField.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "pmsz/grid.hpp"

namespace oracle {

using pmsz::Dims;
using pmsz::ScalarField;
using pmsz::VertexId;

// Freudenthal edges: offsets in {0,1}^3 or {0,-1}^3, minus the origin.
inline std::vector<VertexId> edges(const Dims& d, VertexId v) {
  const long x = static_cast<long>(v % d.nx), y = static_cast<long>((v / d.nx) % d.ny),
             z = static_cast<long>(v / (d.nx * d.ny));
  std::vector<VertexId> out;
  for (int sign : {1, -1})
    for (int bits = 1; bits < 8; ++bits) {
      const long dx = sign * (bits & 1), dy = sign * ((bits >> 1) & 1), dz = sign * ((bits >> 2) & 1);
      const long nx = x + dx, ny = y + dy, nz = z + dz;
      if (nx < 0 || ny < 0 || nz < 0 || nx >= static_cast<long>(d.nx) ||
          ny >= static_cast<long>(d.ny) || nz >= static_cast<long>(d.nz))
        continue;
      out.push_back(static_cast<VertexId>(nx + static_cast<long>(d.nx) * (ny + static_cast<long>(d.ny) * nz)));
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool less(const std::vector<double>& f, VertexId i, VertexId j) {
  if (f[i] != f[j]) return f[i] < f[j];
  return i < j;
}

inline std::vector<double> values(const ScalarField& s) {
  return {s.values().begin(), s.values().end()};
}

inline VertexId largest(const Dims& d, const std::vector<double>& f, VertexId v) {
  VertexId best = pmsz::kNoVertex;
  for (VertexId j : edges(d, v))
    if (best == pmsz::kNoVertex || less(f, best, j)) best = j;
  return best;
}

inline VertexId smallest(const Dims& d, const std::vector<double>& f, VertexId v) {
  VertexId best = pmsz::kNoVertex;
  for (VertexId j : edges(d, v))
    if (best == pmsz::kNoVertex || less(f, j, best)) best = j;
  return best;
}

inline bool is_max(const Dims& d, const std::vector<double>& f, VertexId v) {
  for (VertexId j : edges(d, v))
    if (!less(f, j, v)) return false;
  return true;
}

inline bool is_min(const Dims& d, const std::vector<double>& f, VertexId v) {
  for (VertexId j : edges(d, v))
    if (!less(f, v, j)) return false;
  return true;
}

struct Extrema {
  std::vector<VertexId> maxima, minima;
};

inline Extrema extrema(const ScalarField& s) {
  const auto f = values(s);
  Extrema e;
  for (VertexId v = 0; v < f.size(); ++v) {
    if (is_max(s.dims(), f, v)) e.maxima.push_back(v);
    if (is_min(s.dims(), f, v)) e.minima.push_back(v);
  }
  return e;
}

struct Labels {
  std::vector<VertexId> asc, desc;
};

// Walks each vertex to its extremum, one step at a time.
inline Labels segmentation(const ScalarField& s) {
  const auto f = values(s);
  const Dims& d = s.dims();
  Labels l{std::vector<VertexId>(f.size()), std::vector<VertexId>(f.size())};
  for (VertexId v = 0; v < f.size(); ++v) {
    VertexId u = v;
    while (!is_min(d, f, u)) u = smallest(d, f, u);
    l.asc[v] = u;
    u = v;
    while (!is_max(d, f, u)) u = largest(d, f, u);
    l.desc[v] = u;
  }
  return l;
}

struct Report {
  std::vector<VertexId> fp_max, fn_max, fp_min, fn_min, asc, desc;
  std::size_t wrong = 0;
};

inline Report compare(const ScalarField& ref, const ScalarField& test) {
  const auto f = values(ref), g = values(test);
  const Dims& d = ref.dims();
  Report r;
  for (VertexId v = 0; v < f.size(); ++v) {
    const bool fmax = is_max(d, f, v), gmax = is_max(d, g, v);
    const bool fmin = is_min(d, f, v), gmin = is_min(d, g, v);
    if (gmax && !fmax) r.fp_max.push_back(v);
    if (fmax && !gmax) r.fn_max.push_back(v);
    if (gmin && !fmin) r.fp_min.push_back(v);
    if (fmin && !gmin) r.fn_min.push_back(v);
    if (!fmax && largest(d, f, v) != largest(d, g, v)) r.asc.push_back(v);
    if (!fmin && smallest(d, f, v) != smallest(d, g, v)) r.desc.push_back(v);
  }
  const Labels a = segmentation(ref), b = segmentation(test);
  for (VertexId v = 0; v < f.size(); ++v)
    r.wrong += (a.asc[v] != b.asc[v] || a.desc[v] != b.desc[v]);
  return r;
}

// Random field with deliberate plateaus: `levels` distinct values.
inline ScalarField random_field(std::mt19937_64& rng, const Dims& d, int levels = 0) {
  std::vector<double> v(d.size());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> q(0, std::max(levels - 1, 0));
  for (double& x : v) x = levels > 0 ? q(rng) * 0.25 : u(rng);
  return ScalarField(d, std::move(v));
}

inline Dims random_dims(std::mt19937_64& rng, std::size_t max_side, bool allow_3d = true) {
  std::uniform_int_distribution<std::size_t> side(2, max_side);
  Dims d{side(rng), side(rng), 1};
  if (allow_3d && rng() % 2) d.nz = side(rng);
  return d;
}

}  // namespace oracle
