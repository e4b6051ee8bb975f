#pragma once

// Serial correction engine. Starting from the decompressed field it lowers
// values (never raises them, never below f - xi) until every extremum and
// every vertex's steepest up/down neighbor agrees with the original field.
// Those two local conditions fix the whole segmentation without tracing
// integral lines.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "pmsz/grid.hpp"

namespace pmsz {

struct CorrectionConfig {
  double xi_abs = 0.0;
  double tau = 0.0;  // edit decrement
  std::size_t max_outer_iters = 0;

  /// Upper bound on how often one vertex may change: ceil(2 xi / tau) + 1.
  std::size_t per_vertex_edit_bound() const;
};

/// tau = 0 picks xi / 1024; max_outer_iters = 0 picks 10 * ceil(2 xi / tau).
/// Throws InputError unless 0 < tau < 2 xi.
CorrectionConfig make_config(double xi_abs, double tau = 0.0, std::size_t max_outer_iters = 0);

struct BoundsField {
  std::vector<double> lower;  // f - xi
  std::vector<double> upper;  // f + xi
};

BoundsField compute_bounds(const ScalarField& f, double xi_abs);

/// max(min(g, target), lower).
inline double apply_edit(double g_current, double proposed_target, double lower) noexcept {
  const double t = proposed_target < g_current ? proposed_target : g_current;
  return t > lower ? t : lower;
}

enum class DistortionKind : std::uint8_t { FPmax, FNmax, FPmin, FNmin, AscOrder, DescOrder };

std::string_view kind_name(DistortionKind kind) noexcept;

struct Distortion {
  DistortionKind kind;
  VertexId center;
  /// Extremal neighbor of center in the original field (n_max for FPmax and
  /// AscOrder, n_min for FPmin and DescOrder), else kNoVertex.
  VertexId expected = kNoVertex;
  /// Extremal neighbor of center in the current field on the same side.
  VertexId observed = kNoVertex;

  friend bool operator==(const Distortion&, const Distortion&) = default;
};

/// Sorted by center, then kind. Throws InputError on dims mismatch.
std::vector<Distortion> detect_distortions(const ScalarField& f, const ScalarField& g);

/// Per-target minimum over all rule proposals, computed against g as given.
std::map<VertexId, double> propose_corrections(const ScalarField& f, const ScalarField& g,
                                               const BoundsField& bounds, double tau,
                                               const std::vector<Distortion>& detections);

struct EditSet {
  std::vector<VertexId> ids;  // strictly ascending
  std::vector<double> values;  // corrected values
  std::size_t vertex_count = 0;  // 0 when unknown

  std::size_t size() const noexcept { return ids.size(); }
  double edit_ratio() const noexcept {
    return vertex_count == 0 ? 0.0 : static_cast<double>(ids.size()) / vertex_count;
  }
  friend bool operator==(const EditSet&, const EditSet&) = default;
};

/// Vertices where g differs from decompressed, with g's values.
EditSet diff_edits(const ScalarField& decompressed, const ScalarField& g);

/// Overwrites the listed vertices. Throws InputError on out-of-range ids.
ScalarField apply_edits(const ScalarField& decompressed, const EditSet& edits);

struct IterationResult {
  ScalarField g;
  std::size_t edits_applied = 0;
};

/// One Jacobi step: detect on g, min-merge proposals, apply with clamping.
IterationResult correction_iteration(const ScalarField& f, const ScalarField& g,
                                     const BoundsField& bounds, double tau);

struct CorrectionResult {
  ScalarField g;
  EditSet edits;
  std::size_t iterations = 0;
  std::vector<std::size_t> edits_per_iteration;
  /// Most value changes any single vertex went through.
  std::uint32_t max_vertex_edits = 0;
};

/// Checks L <= f_hat <= U against stored bounds; throws ContractError at
/// the first offending vertex.
void validate_decompressed(const ScalarField& f, const ScalarField& decompressed,
                           const BoundsField& bounds);

/// Iterates to a zero-edit fixpoint. Throws ContractError when the input
/// breaks the bound, ConvergenceError when the cap is hit or the fixpoint
/// still carries distortions.
CorrectionResult run_correction(const ScalarField& f, const ScalarField& decompressed,
                                const CorrectionConfig& config);

}  // namespace pmsz
