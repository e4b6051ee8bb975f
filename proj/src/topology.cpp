#include "pmsz/topology.hpp"

#include <algorithm>
#include <iterator>

#include "pmsz/errors.hpp"

namespace pmsz {
namespace {

// up[i] = steepest ascent successor, or i at a maximum; down symmetric.
struct Successors {
  std::vector<VertexId> up;
  std::vector<VertexId> down;
};

Successors successors(const ScalarField& field) {
  const NeighborExtremes ext = neighbor_extremes(field);
  const auto v = field.values();
  Successors s{ext.largest, ext.smallest};
  for (VertexId i = 0; i < field.size(); ++i) {
    if (key_less(v, s.up[i], i)) s.up[i] = i;
    if (key_less(v, i, s.down[i])) s.down[i] = i;
  }
  return s;
}

// Jacobi pointer jumping: after round k every entry points 2^k steps ahead.
std::vector<VertexId> jump_to_roots(std::vector<VertexId> next) {
  std::vector<VertexId> scratch(next.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < next.size(); ++i) {
      scratch[i] = next[next[i]];
      changed |= scratch[i] != next[i];
    }
    next.swap(scratch);
  }
  return next;
}

std::vector<VertexId> set_minus(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
  std::vector<VertexId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

VertexId extreme_neighbor(const ScalarField& field, VertexId i, Direction direction) {
  if (i >= field.size()) throw InputError("vertex " + std::to_string(i) + " out of range");
  const auto v = field.values();
  VertexId best = kNoVertex;
  Stencil(field.dims()).visit(i, [&](VertexId j) {
    if (best == kNoVertex) {
      best = j;
    } else if (direction == Direction::Ascending ? key_less(v, best, j) : key_less(v, j, best)) {
      best = j;
    }
  });
  return best;
}

NeighborExtremes neighbor_extremes(const ScalarField& field) {
  const auto v = field.values();
  const Stencil stencil(field.dims());
  NeighborExtremes out{std::vector<VertexId>(field.size()), std::vector<VertexId>(field.size())};
  for (VertexId i = 0; i < field.size(); ++i) {
    VertexId hi = kNoVertex, lo = kNoVertex;
    stencil.visit(i, [&](VertexId j) {
      if (hi == kNoVertex) {
        hi = lo = j;
        return;
      }
      if (key_less(v, hi, j)) hi = j;
      if (key_less(v, j, lo)) lo = j;
    });
    out.largest[i] = hi;
    out.smallest[i] = lo;
  }
  return out;
}

ExtremaSet find_extrema(const ScalarField& field) {
  const Successors s = successors(field);
  ExtremaSet out;
  for (VertexId i = 0; i < field.size(); ++i) {
    if (s.up[i] == i) out.maxima.push_back(i);
    if (s.down[i] == i) out.minima.push_back(i);
  }
  return out;
}

SegmentationLabels compute_segmentation(const ScalarField& field) {
  Successors s = successors(field);
  SegmentationLabels out;
  out.asc_target = jump_to_roots(std::move(s.down));
  out.desc_target = jump_to_roots(std::move(s.up));
  return out;
}

SegmentationLabels compute_segmentation_naive(const ScalarField& field) {
  const Successors s = successors(field);
  const std::size_t n = field.size();
  SegmentationLabels out{std::vector<VertexId>(n), std::vector<VertexId>(n)};
  for (VertexId i = 0; i < n; ++i) {
    VertexId a = i;
    while (s.down[a] != a) a = s.down[a];
    VertexId d = i;
    while (s.up[d] != d) d = s.up[d];
    out.asc_target[i] = a;
    out.desc_target[i] = d;
  }
  return out;
}

DistortionReport compare_plmss(const ScalarField& reference, const ScalarField& test) {
  if (reference.dims() != test.dims())
    throw InputError("dims mismatch: " + reference.dims().to_string() + " vs " +
                     test.dims().to_string());
  const auto rv = reference.values();
  const auto tv = test.values();
  const NeighborExtremes re = neighbor_extremes(reference);
  const NeighborExtremes te = neighbor_extremes(test);

  DistortionReport report;
  std::vector<VertexId> rmax, rmin, tmax, tmin;
  for (VertexId i = 0; i < reference.size(); ++i) {
    const bool ref_max = key_less(rv, re.largest[i], i);
    const bool ref_min = key_less(rv, i, re.smallest[i]);
    if (ref_max) rmax.push_back(i);
    if (ref_min) rmin.push_back(i);
    if (key_less(tv, te.largest[i], i)) tmax.push_back(i);
    if (key_less(tv, i, te.smallest[i])) tmin.push_back(i);
    if (!ref_max && te.largest[i] != re.largest[i]) report.asc_order_violations.push_back(i);
    if (!ref_min && te.smallest[i] != re.smallest[i]) report.desc_order_violations.push_back(i);
  }
  report.fp_max = set_minus(tmax, rmax);
  report.fn_max = set_minus(rmax, tmax);
  report.fp_min = set_minus(tmin, rmin);
  report.fn_min = set_minus(rmin, tmin);

  const SegmentationLabels rl = compute_segmentation(reference);
  const SegmentationLabels tl = compute_segmentation(test);
  for (VertexId i = 0; i < reference.size(); ++i)
    if (rl.asc_target[i] != tl.asc_target[i] || rl.desc_target[i] != tl.desc_target[i])
      ++report.wrong_label_count;
  return report;
}

}  // namespace pmsz
