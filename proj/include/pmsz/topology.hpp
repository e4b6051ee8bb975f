#pragma once

// Extrema, steepest neighbors and piecewise-linear Morse-Smale segmentation
// labels on the Freudenthal grid, plus field-vs-field distortion reports.

#include <cstddef>
#include <vector>

#include "pmsz/grid.hpp"

namespace pmsz {

enum class Direction { Ascending, Descending };

struct ExtremaSet {
  std::vector<VertexId> maxima;  // ascending ids
  std::vector<VertexId> minima;  // ascending ids
  friend bool operator==(const ExtremaSet&, const ExtremaSet&) = default;
};

/// Per vertex: the minimum reached by steepest descent (asc_target) and the
/// maximum reached by steepest ascent (desc_target). The pair names the
/// Morse-Smale region the vertex belongs to.
struct SegmentationLabels {
  std::vector<VertexId> asc_target;
  std::vector<VertexId> desc_target;
  friend bool operator==(const SegmentationLabels&, const SegmentationLabels&) = default;
};

/// Raw extremal neighbors of every vertex, defined even at extrema.
struct NeighborExtremes {
  std::vector<VertexId> largest;
  std::vector<VertexId> smallest;
};

struct DistortionReport {
  std::vector<VertexId> fp_max, fn_max, fp_min, fn_min;
  std::vector<VertexId> asc_order_violations;   // n_max differs
  std::vector<VertexId> desc_order_violations;  // n_min differs
  /// Vertices whose (asc_target, desc_target) pair differs.
  std::size_t wrong_label_count = 0;

  std::size_t total() const noexcept {
    return fp_max.size() + fn_max.size() + fp_min.size() + fn_min.size() +
           asc_order_violations.size() + desc_order_violations.size() + wrong_label_count;
  }
  bool all_zero() const noexcept { return total() == 0; }
  friend bool operator==(const DistortionReport&, const DistortionReport&) = default;
};

/// Largest (Ascending) or smallest (Descending) neighbor of i under OrderKey.
VertexId extreme_neighbor(const ScalarField& field, VertexId i, Direction direction);

NeighborExtremes neighbor_extremes(const ScalarField& field);

ExtremaSet find_extrema(const ScalarField& field);

/// Pointer-jumping over the steepest-successor graphs.
SegmentationLabels compute_segmentation(const ScalarField& field);

/// Walks every vertex's path step by step. Slow; used as a cross-check.
SegmentationLabels compute_segmentation_naive(const ScalarField& field);

/// Throws InputError on dims mismatch.
DistortionReport compare_plmss(const ScalarField& reference, const ScalarField& test);

}  // namespace pmsz
