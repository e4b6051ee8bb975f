#pragma once

// A rectangular window of the grid that the correction rules run on. The
// serial engine uses one patch covering the domain; block workers use one
// per block, where the window is the core plus a one-vertex ghost shell.
//
// Local indices are row-major inside the window, so comparing two local
// indices orders them exactly like their global ids. Tie-breaks therefore
// agree between a patch and the full field.

#include <cstdint>
#include <span>
#include <vector>

#include "pmsz/correction.hpp"
#include "pmsz/grid.hpp"

namespace pmsz::detail {

/// Original-field facts about a detection center, fixed for the whole run.
struct CenterInfo {
  VertexId largest;   // n_max
  VertexId smallest;  // n_min
  bool is_max;
  bool is_min;
};

template <class Sink>
void detect_at(VertexId c, const CenterInfo& info, std::span<const double> g,
               const Stencil& stencil, Sink&& sink) {
  VertexId hi = kNoVertex, lo = kNoVertex;
  stencil.visit(c, [&](VertexId j) {
    if (hi == kNoVertex) {
      hi = lo = j;
      return;
    }
    if (key_less(g, hi, j)) hi = j;
    if (key_less(g, j, lo)) lo = j;
  });
  const bool g_max = key_less(g, hi, c);
  const bool g_min = key_less(g, c, lo);
  if (g_max && !info.is_max) sink(Distortion{DistortionKind::FPmax, c, info.largest, hi});
  if (info.is_max && !g_max) sink(Distortion{DistortionKind::FNmax, c, kNoVertex, hi});
  if (g_min && !info.is_min) sink(Distortion{DistortionKind::FPmin, c, info.smallest, lo});
  if (info.is_min && !g_min) sink(Distortion{DistortionKind::FNmin, c, kNoVertex, lo});
  if (!info.is_max && hi != info.largest)
    sink(Distortion{DistortionKind::AscOrder, c, info.largest, hi});
  if (!info.is_min && lo != info.smallest)
    sink(Distortion{DistortionKind::DescOrder, c, info.smallest, lo});
}

/// Emits (target, proposed value) pairs for one distortion.
template <class Emit>
void propose_for(const Distortion& d, std::span<const double> g, const Stencil& stencil,
                 double tau, Emit&& emit) {
  const VertexId c = d.center;
  switch (d.kind) {
    case DistortionKind::FPmax:
      emit(c, g[d.expected] - tau);
      break;
    case DistortionKind::FNmax: {
      const double v = g[c] - tau;
      stencil.visit(c, [&](VertexId j) {
        if (key_less(g, c, j)) emit(j, v);
      });
      break;
    }
    case DistortionKind::FPmin:
      emit(d.expected, g[c] - tau);
      break;
    case DistortionKind::FNmin:
      emit(c, g[d.observed] - tau);
      break;
    case DistortionKind::AscOrder: {
      const VertexId keep = d.expected;
      const double v = g[keep] - tau;
      stencil.visit(c, [&](VertexId j) {
        if (j != keep && !key_less(g, j, keep)) emit(j, v);
      });
      break;
    }
    case DistortionKind::DescOrder:
      emit(d.expected, g[d.observed] - tau);
      break;
  }
}

class Patch {
 public:
  /// Copies the window `ext` out of full-domain arrays; centers are the
  /// vertices of `core`, which must lie inside `ext`.
  Patch(const Dims& global, const Box& ext, const Box& core, std::span<const double> f,
        std::span<const double> lower, std::span<const double> g);

  struct Step {
    std::size_t edits = 0;
    std::size_t detections = 0;
  };

  /// One Jacobi iteration over the current g.
  Step iterate(double tau);

  template <class Sink>
  void detect(Sink&& sink) const {
    for (std::size_t k = 0; k < centers_.size(); ++k)
      detect_at(centers_[k], info_[k], g_, stencil_, sink);
  }

  const Dims& local_dims() const noexcept { return local_; }
  const Box& ext() const noexcept { return ext_; }
  const Box& core() const noexcept { return core_; }
  VertexId local_index(const Coord& global) const noexcept {
    return (global.x - ext_.lo.x) +
           local_.nx * ((global.y - ext_.lo.y) + local_.ny * (global.z - ext_.lo.z));
  }

  std::span<const double> g() const noexcept { return g_; }
  std::span<double> g() noexcept { return g_; }
  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const std::uint32_t> edit_counts() const noexcept { return edit_counts_; }

 private:
  Dims local_;
  Box ext_;
  Box core_;
  Stencil stencil_;
  std::vector<double> f_, lower_, g_, proposal_;
  std::vector<std::uint32_t> edit_counts_;
  std::vector<VertexId> centers_;
  std::vector<CenterInfo> info_;
};

/// Copies a box out of a full-domain array, row by row.
void gather_box(const Dims& global, const Box& box, std::span<const double> src,
                std::span<double> dst);

}  // namespace pmsz::detail
