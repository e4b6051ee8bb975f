#pragma once

// Block-parallel correction. The grid is cut into disjoint cores, each
// padded with a one-vertex ghost shell. Blocks correct independently and
// meet only at barriers, where every shared vertex takes the minimum of its
// replicas. Bulk-synchronous: compute phase, then exchange phase.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pmsz/correction.hpp"
#include "pmsz/grid.hpp"

namespace pmsz {

namespace detail {
class Patch;
}

enum class SyncStrategy {
  Lockstep,  // exchange after every local iteration
  Relaxed,   // exchange after each block converges locally
};

std::string_view strategy_name(SyncStrategy s) noexcept;
/// "lockstep" | "relaxed"; throws InputError otherwise.
SyncStrategy parse_strategy(std::string_view text);

struct BlockExtent {
  Box core;      // owned vertices
  Box extended;  // core dilated by one in every direction, clipped
};

struct BlockDecomposition {
  Dims dims;
  Dims block_grid;
  std::vector<BlockExtent> blocks;  // x-fastest over the block grid
};

/// Near-equal cores; the first (n mod b) blocks along an axis get one extra
/// layer. Throws InputError when a block-grid extent is 0 or exceeds dims.
BlockDecomposition decompose(const Dims& dims, const Dims& block_grid);

struct LocalResult {
  std::size_t iterations = 0;
  std::size_t edits = 0;
  bool at_fixpoint = false;  // last iteration applied no edits
};

/// Per-block state plus the ghost exchange plan. Blocks only talk through
/// sync_ghosts, which passes immutable value messages between them.
class BlockSystem {
 public:
  BlockSystem(const ScalarField& f, const ScalarField& decompressed, const BoundsField& bounds,
              BlockDecomposition decomposition);
  ~BlockSystem();
  BlockSystem(BlockSystem&&) noexcept;
  BlockSystem& operator=(BlockSystem&&) noexcept;

  const BlockDecomposition& decomposition() const noexcept { return decomposition_; }
  std::size_t block_count() const noexcept { return decomposition_.blocks.size(); }

  /// Relaxed: iterate until a zero-edit iteration. Lockstep: one iteration.
  /// Detection centers are core vertices; edits may land on ghosts.
  LocalResult local_converge(std::size_t block, const CorrectionConfig& config,
                             SyncStrategy strategy);

  /// Min-merges every replicated vertex. Returns whether any replica changed.
  /// `workers` bounds the threads used for packing and merging.
  bool sync_ghosts(std::size_t workers = 1);

  /// Replica of a global vertex held by `block`; it must lie in the extended box.
  double replica(std::size_t block, VertexId global) const;
  void set_replica(std::size_t block, VertexId global, double value);
  bool holds(std::size_t block, VertexId global) const;

  /// Core values of every block. Throws InternalError when some ghost
  /// replica disagrees with its owner.
  ScalarField assemble() const;

  std::span<const std::uint32_t> edit_counts(std::size_t block) const;
  std::span<const double> block_values(std::size_t block) const;
  std::span<const double> block_lower(std::size_t block) const;

  std::size_t messages_per_sync() const noexcept { return plan_.size(); }

 private:
  struct Link {
    std::size_t from, to;
    Box overlap;
  };

  BlockDecomposition decomposition_;
  std::vector<std::unique_ptr<detail::Patch>> patches_;
  std::vector<Link> plan_;
};

struct ParallelStats {
  std::size_t rounds = 0;
  std::size_t syncs = 0;
  std::vector<std::size_t> per_block_iterations;
  std::vector<std::size_t> per_block_edits;  // local edits summed over rounds
  std::size_t edit_count = 0;                // vertices with g != f_hat
  double edit_ratio = 0.0;
  std::size_t sync_changes = 0;  // syncs that lowered at least one replica
  std::uint32_t max_vertex_edits = 0;  // most local edits on one replica
  double compute_seconds = 0.0;
  double sync_seconds = 0.0;
  double total_seconds = 0.0;
};

struct ParallelOptions {
  std::size_t workers = 1;  // 0 = hardware concurrency
  /// Checks after every phase that each replica only moved down and stayed
  /// above its lower bound; throws InternalError otherwise.
  bool check_invariants = false;
};

struct ParallelResult {
  CorrectionResult result;  // iterations = rounds
  ParallelStats stats;
};

/// Rounds of {local_converge on every block; sync_ghosts}. Stops after an
/// idle exchange that follows a compute phase in which every block ended at
/// a local fixpoint: nothing can change after that.
ParallelResult run_parallel(const ScalarField& f, const ScalarField& decompressed,
                            const CorrectionConfig& config, const Dims& block_grid,
                            SyncStrategy strategy, const ParallelOptions& options = {});

}  // namespace pmsz
