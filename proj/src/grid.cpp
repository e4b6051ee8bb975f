#include "pmsz/grid.hpp"

#include <charconv>
#include <cmath>

#include "pmsz/errors.hpp"

namespace pmsz {

std::string Dims::to_string() const {
  return std::to_string(nx) + "x" + std::to_string(ny) + "x" + std::to_string(nz);
}

void validate_dims(const Dims& dims) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0)
    throw InputError("grid extents must be >= 1, got " + dims.to_string());
  const int big = (dims.nx >= 2) + (dims.ny >= 2) + (dims.nz >= 2);
  if (big < 2)
    throw InputError("grid needs at least two extents >= 2, got " + dims.to_string());
}

Dims parse_dims(const std::string& text) {
  std::size_t parts[3] = {1, 1, 1};
  std::size_t count = 0;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    if (count == 3) throw InputError("too many extents in '" + text + "'");
    auto [next, ec] = std::from_chars(p, end, parts[count]);
    if (ec != std::errc() || next == p)
      throw InputError("cannot parse extents '" + text + "'");
    ++count;
    p = next;
    if (p < end) {
      if (*p != 'x' && *p != 'X') throw InputError("cannot parse extents '" + text + "'");
      ++p;
      if (p == end) throw InputError("cannot parse extents '" + text + "'");
    }
  }
  if (count < 2) throw InputError("need NXxNY or NXxNYxNZ, got '" + text + "'");
  return {parts[0], parts[1], parts[2]};
}

Stencil::Stencil(const Dims& dims) : dims_(dims) {
  const auto stride_y = static_cast<std::ptrdiff_t>(dims.nx);
  const auto stride_z = static_cast<std::ptrdiff_t>(dims.nx * dims.ny);
  for (const Offset& o : kStencil) {
    if ((o.dx != 0 && dims.nx == 1) || (o.dy != 0 && dims.ny == 1) ||
        (o.dz != 0 && dims.nz == 1))
      continue;
    offsets_[count_] = o;
    delta_[count_] = o.dx + o.dy * stride_y + o.dz * stride_z;
    ++count_;
  }
}

std::vector<VertexId> neighbors(const Dims& dims, VertexId v) {
  validate_dims(dims);
  if (v >= dims.size())
    throw InputError("vertex " + std::to_string(v) + " outside " + dims.to_string());
  std::vector<VertexId> out;
  out.reserve(14);
  Stencil(dims).visit(v, [&](VertexId j) { out.push_back(j); });
  return out;
}

ScalarField::ScalarField(Dims dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  validate_dims(dims_);
  if (values_.size() != dims_.size())
    throw InputError("field of " + dims_.to_string() + " needs " +
                     std::to_string(dims_.size()) + " values, got " +
                     std::to_string(values_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw InputError("non-finite value at vertex " + std::to_string(i));
}

ScalarField ScalarField::filled(Dims dims, double value) {
  validate_dims(dims);
  return ScalarField(dims, std::vector<double>(dims.size(), value));
}

bool precedes(const ScalarField& field, VertexId i, VertexId j) {
  if (i >= field.size() || j >= field.size())
    throw InputError("vertex id out of range");
  if (i == j) throw InputError("precedes() needs two distinct vertices");
  return OrderKey{field[i], i} < OrderKey{field[j], j};
}

}  // namespace pmsz
