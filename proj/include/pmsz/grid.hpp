#pragma once

// Regular-grid scalar fields, the Freudenthal neighborhood, and the
// (value, id) total order used everywhere vertices are compared.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pmsz {

using VertexId = std::size_t;

inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

struct Coord {
  std::size_t x = 0, y = 0, z = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

struct Dims {
  std::size_t nx = 1, ny = 1, nz = 1;

  std::size_t size() const noexcept { return nx * ny * nz; }
  bool is_2d() const noexcept { return nz == 1; }
  VertexId index(std::size_t x, std::size_t y, std::size_t z = 0) const noexcept {
    return x + nx * (y + ny * z);
  }
  VertexId index(const Coord& c) const noexcept { return index(c.x, c.y, c.z); }
  Coord coord(VertexId v) const noexcept {
    return {v % nx, (v / nx) % ny, v / (nx * ny)};
  }
  std::string to_string() const;

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Axis-aligned window of a grid: origin plus extent.
struct Box {
  Coord lo;
  Dims extent;

  std::size_t size() const noexcept { return extent.size(); }
  bool contains(const Coord& c) const noexcept {
    return c.x >= lo.x && c.x < lo.x + extent.nx && c.y >= lo.y && c.y < lo.y + extent.ny &&
           c.z >= lo.z && c.z < lo.z + extent.nz;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

/// Throws InputError unless every extent is >= 1 and at least two are >= 2.
void validate_dims(const Dims& dims);

/// Parses "NXxNY" or "NXxNYxNZ".
Dims parse_dims(const std::string& text);

struct Offset {
  int dx, dy, dz;
};

/// Edge vectors of the Kuhn subdivision along the (1,1,1) diagonal, in
/// enumeration order. 2D grids use the subset with dz == 0.
inline constexpr std::array<Offset, 14> kStencil{{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
    {1, 1, 0}, {-1, -1, 0}, {0, 1, 1}, {0, -1, -1}, {1, 0, 1}, {-1, 0, -1},
    {1, 1, 1}, {-1, -1, -1},
}};

/// Per-dims neighbor enumerator. Interior vertices take a branch-free path
/// over precomputed linear deltas; boundary vertices clip per offset.
class Stencil {
 public:
  explicit Stencil(const Dims& dims);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t max_degree() const noexcept { return count_; }

  template <class Fn>
  void visit(VertexId v, Fn&& fn) const {
    const Coord c = dims_.coord(v);
    if (is_interior(c)) {
      for (std::size_t k = 0; k < count_; ++k) fn(v + delta_[k]);
      return;
    }
    for (std::size_t k = 0; k < count_; ++k) {
      const Offset& o = offsets_[k];
      if (!in_range(c.x, o.dx, dims_.nx) || !in_range(c.y, o.dy, dims_.ny) ||
          !in_range(c.z, o.dz, dims_.nz))
        continue;
      fn(v + delta_[k]);
    }
  }

 private:
  static bool in_range(std::size_t c, int d, std::size_t n) noexcept {
    return d == 0 || (d > 0 ? c + 1 < n : c > 0);
  }
  bool is_interior(const Coord& c) const noexcept {
    return (dims_.nx == 1 || (c.x > 0 && c.x + 1 < dims_.nx)) &&
           (dims_.ny == 1 || (c.y > 0 && c.y + 1 < dims_.ny)) &&
           (dims_.nz == 1 || (c.z > 0 && c.z + 1 < dims_.nz));
  }

  Dims dims_;
  std::size_t count_ = 0;
  std::array<Offset, 14> offsets_{};
  std::array<std::ptrdiff_t, 14> delta_{};
};

/// In-bounds Freudenthal neighbors of v in fixed enumeration order.
std::vector<VertexId> neighbors(const Dims& dims, VertexId v);

class ScalarField {
 public:
  ScalarField() = default;
  /// Validates dims, length and finiteness.
  ScalarField(Dims dims, std::vector<double> values);

  static ScalarField filled(Dims dims, double value);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](VertexId v) const noexcept { return values_[v]; }
  std::span<const double> values() const noexcept { return values_; }
  /// Callers must keep every value finite.
  std::span<double> mutable_values() noexcept { return values_; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  Dims dims_;
  std::vector<double> values_;
};

/// Simulation-of-simplicity key: value first, vertex id breaks ties.
struct OrderKey {
  double value;
  VertexId id;

  friend bool operator<(const OrderKey& a, const OrderKey& b) noexcept {
    return a.value < b.value || (a.value == b.value && a.id < b.id);
  }
  friend bool operator>(const OrderKey& a, const OrderKey& b) noexcept { return b < a; }
};

/// Strict "i comes before j" on raw arrays; ids double as tie-breakers.
inline bool key_less(std::span<const double> v, VertexId i, VertexId j) noexcept {
  return v[i] < v[j] || (v[i] == v[j] && i < j);
}

/// Checked form of the total order. Throws InputError on i == j or range errors.
bool precedes(const ScalarField& field, VertexId i, VertexId j);

}  // namespace pmsz
