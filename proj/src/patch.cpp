#include "pmsz/detail/patch.hpp"

#include <algorithm>
#include <limits>

#include "pmsz/errors.hpp"
#include "pmsz/simd/kernels.hpp"

namespace pmsz::detail {

void gather_box(const Dims& global, const Box& box, std::span<const double> src,
                std::span<double> dst) {
  const std::size_t row = box.extent.nx;
  std::size_t out = 0;
  for (std::size_t z = 0; z < box.extent.nz; ++z)
    for (std::size_t y = 0; y < box.extent.ny; ++y) {
      const VertexId start = global.index(box.lo.x, box.lo.y + y, box.lo.z + z);
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(start), row,
                  dst.begin() + static_cast<std::ptrdiff_t>(out));
      out += row;
    }
}

Patch::Patch(const Dims& global, const Box& ext, const Box& core, std::span<const double> f,
             std::span<const double> lower, std::span<const double> g)
    : local_(ext.extent), ext_(ext), core_(core), stencil_(ext.extent) {
  const Coord core_hi{core.lo.x + core.extent.nx - 1, core.lo.y + core.extent.ny - 1,
                      core.lo.z + core.extent.nz - 1};
  if (!ext.contains(core.lo) || !ext.contains(core_hi))
    throw InternalError("patch core escapes its extended window");

  const std::size_t n = ext.size();
  f_.resize(n);
  lower_.resize(n);
  g_.resize(n);
  gather_box(global, ext, f, f_);
  gather_box(global, ext, lower, lower_);
  gather_box(global, ext, g, g_);
  proposal_.resize(n);
  edit_counts_.assign(n, 0);

  centers_.reserve(core.size());
  for (std::size_t z = 0; z < core.extent.nz; ++z)
    for (std::size_t y = 0; y < core.extent.ny; ++y)
      for (std::size_t x = 0; x < core.extent.nx; ++x)
        centers_.push_back(local_index({core.lo.x + x, core.lo.y + y, core.lo.z + z}));

  info_.reserve(centers_.size());
  for (VertexId c : centers_) {
    VertexId hi = kNoVertex, lo = kNoVertex;
    stencil_.visit(c, [&](VertexId j) {
      if (hi == kNoVertex) {
        hi = lo = j;
        return;
      }
      if (key_less(f_, hi, j)) hi = j;
      if (key_less(f_, j, lo)) lo = j;
    });
    info_.push_back({hi, lo, key_less(f_, hi, c), key_less(f_, c, lo)});
  }
}

Patch::Step Patch::iterate(double tau) {
  std::fill(proposal_.begin(), proposal_.end(), std::numeric_limits<double>::infinity());
  Step step;
  const std::span<const double> snapshot = g_;
  auto merge = [this](VertexId target, double value) {
    if (value < proposal_[target]) proposal_[target] = value;
  };
  detect([&](const Distortion& d) {
    ++step.detections;
    propose_for(d, snapshot, stencil_, tau, merge);
  });
  if (step.detections != 0)
    step.edits = simd::kernels().apply_clamped(g_, proposal_, lower_, edit_counts_);
  return step;
}

}  // namespace pmsz::detail
