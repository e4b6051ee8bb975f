#include "pmsz/distributed.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <thread>

#include "pmsz/detail/patch.hpp"
#include "pmsz/errors.hpp"
#include "pmsz/simd/kernels.hpp"

namespace pmsz {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs fn(0..n-1) on up to `workers` threads. Tasks must be independent.
// The lowest-index failure is rethrown so errors do not depend on timing.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

bool intersect(const Box& a, const Box& b, Box& out) {
  auto axis = [](std::size_t alo, std::size_t an, std::size_t blo, std::size_t bn,
                 std::size_t& lo, std::size_t& n) {
    lo = std::max(alo, blo);
    const std::size_t hi = std::min(alo + an, blo + bn);
    if (hi <= lo) return false;
    n = hi - lo;
    return true;
  };
  return axis(a.lo.x, a.extent.nx, b.lo.x, b.extent.nx, out.lo.x, out.extent.nx) &&
         axis(a.lo.y, a.extent.ny, b.lo.y, b.extent.ny, out.lo.y, out.extent.ny) &&
         axis(a.lo.z, a.extent.nz, b.lo.z, b.extent.nz, out.lo.z, out.extent.nz);
}

// Calls fn(local_row_start, row_length) for each x-row of `box` inside `patch`.
template <class Fn>
void for_each_row(const detail::Patch& patch, const Box& box, Fn&& fn) {
  for (std::size_t z = 0; z < box.extent.nz; ++z)
    for (std::size_t y = 0; y < box.extent.ny; ++y)
      fn(patch.local_index({box.lo.x, box.lo.y + y, box.lo.z + z}), box.extent.nx);
}

}  // namespace

std::string_view strategy_name(SyncStrategy s) noexcept {
  return s == SyncStrategy::Lockstep ? "lockstep" : "relaxed";
}

SyncStrategy parse_strategy(std::string_view text) {
  if (text == "lockstep") return SyncStrategy::Lockstep;
  if (text == "relaxed") return SyncStrategy::Relaxed;
  throw InputError("unknown sync strategy '" + std::string(text) + "'");
}

BlockDecomposition decompose(const Dims& dims, const Dims& block_grid) {
  validate_dims(dims);
  const std::size_t n[3] = {dims.nx, dims.ny, dims.nz};
  const std::size_t b[3] = {block_grid.nx, block_grid.ny, block_grid.nz};
  std::vector<std::size_t> starts[3];
  for (int a = 0; a < 3; ++a) {
    if (b[a] == 0 || b[a] > n[a])
      throw InputError("block grid " + block_grid.to_string() + " does not fit dims " +
                       dims.to_string());
    const std::size_t base = n[a] / b[a], rem = n[a] % b[a];
    std::size_t at = 0;
    for (std::size_t i = 0; i <= b[a]; ++i) {
      starts[a].push_back(at);
      at += base + (i < rem ? 1 : 0);
    }
  }

  BlockDecomposition out{dims, block_grid, {}};
  out.blocks.reserve(block_grid.size());
  for (std::size_t bz = 0; bz < b[2]; ++bz)
    for (std::size_t by = 0; by < b[1]; ++by)
      for (std::size_t bx = 0; bx < b[0]; ++bx) {
        const std::size_t idx[3] = {bx, by, bz};
        std::size_t lo[3], len[3], elo[3], elen[3];
        for (int a = 0; a < 3; ++a) {
          lo[a] = starts[a][idx[a]];
          len[a] = starts[a][idx[a] + 1] - lo[a];
          elo[a] = lo[a] > 0 ? lo[a] - 1 : 0;
          elen[a] = std::min(n[a], lo[a] + len[a] + 1) - elo[a];
        }
        out.blocks.push_back({Box{{lo[0], lo[1], lo[2]}, {len[0], len[1], len[2]}},
                              Box{{elo[0], elo[1], elo[2]}, {elen[0], elen[1], elen[2]}}});
      }
  return out;
}

BlockSystem::BlockSystem(const ScalarField& f, const ScalarField& decompressed,
                         const BoundsField& bounds, BlockDecomposition decomposition)
    : decomposition_(std::move(decomposition)) {
  if (f.dims() != decompressed.dims() || f.dims() != decomposition_.dims)
    throw InputError("block system inputs disagree on dims");
  patches_.reserve(decomposition_.blocks.size());
  for (const BlockExtent& blk : decomposition_.blocks)
    patches_.push_back(std::make_unique<detail::Patch>(f.dims(), blk.extended, blk.core,
                                                       f.values(), bounds.lower,
                                                       decompressed.values()));
  const auto& blocks = decomposition_.blocks;
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Box overlap;
      if (a != b && intersect(blocks[a].extended, blocks[b].extended, overlap))
        plan_.push_back({a, b, overlap});
    }
}

BlockSystem::~BlockSystem() = default;
BlockSystem::BlockSystem(BlockSystem&&) noexcept = default;
BlockSystem& BlockSystem::operator=(BlockSystem&&) noexcept = default;

LocalResult BlockSystem::local_converge(std::size_t block, const CorrectionConfig& config,
                                        SyncStrategy strategy) {
  detail::Patch& patch = *patches_.at(block);
  LocalResult r;
  for (;;) {
    const auto step = patch.iterate(config.tau);
    ++r.iterations;
    r.edits += step.edits;
    if (step.edits == 0) {
      if (step.detections != 0)
        throw ConvergenceError("block " + std::to_string(block) +
                                   " stalled with distortions pinned at their lower bounds",
                               r.iterations, step.detections);
      r.at_fixpoint = true;
      break;
    }
    if (strategy == SyncStrategy::Lockstep) break;
    if (r.iterations >= config.max_outer_iters)
      throw ConvergenceError("block " + std::to_string(block) + " exceeded " +
                                 std::to_string(config.max_outer_iters) + " local iterations",
                             r.iterations, step.detections);
  }
  return r;
}

bool BlockSystem::sync_ghosts(std::size_t workers) {
  // Send: every link packs the sender's replicas of the shared box.
  std::vector<std::vector<double>> messages(plan_.size());
  parallel_for(plan_.size(), workers, [&](std::size_t k) {
    const Link& link = plan_[k];
    const detail::Patch& src = *patches_[link.from];
    std::vector<double>& msg = messages[k];
    msg.reserve(link.overlap.size());
    const auto g = src.g();
    for_each_row(src, link.overlap, [&](VertexId start, std::size_t len) {
      msg.insert(msg.end(), g.begin() + static_cast<std::ptrdiff_t>(start),
                 g.begin() + static_cast<std::ptrdiff_t>(start + len));
    });
  });

  // Receive: each block folds in everything addressed to it.
  std::vector<std::uint8_t> changed(patches_.size(), 0);
  const auto& k = simd::kernels();
  parallel_for(patches_.size(), workers, [&](std::size_t b) {
    detail::Patch& dst = *patches_[b];
    const auto g = dst.g();
    std::size_t lowered = 0;
    for (std::size_t m = 0; m < plan_.size(); ++m) {
      if (plan_[m].to != b) continue;
      const std::vector<double>& msg = messages[m];
      std::size_t at = 0;
      for_each_row(dst, plan_[m].overlap, [&](VertexId start, std::size_t len) {
        lowered += k.min_merge(g.subspan(start, len), std::span(msg).subspan(at, len));
        at += len;
      });
    }
    changed[b] = lowered != 0;
  });
  return std::any_of(changed.begin(), changed.end(), [](std::uint8_t c) { return c != 0; });
}

bool BlockSystem::holds(std::size_t block, VertexId global) const {
  return decomposition_.blocks.at(block).extended.contains(decomposition_.dims.coord(global));
}

double BlockSystem::replica(std::size_t block, VertexId global) const {
  if (!holds(block, global)) throw InputError("vertex not replicated in this block");
  const detail::Patch& p = *patches_[block];
  return p.g()[p.local_index(decomposition_.dims.coord(global))];
}

void BlockSystem::set_replica(std::size_t block, VertexId global, double value) {
  if (!holds(block, global)) throw InputError("vertex not replicated in this block");
  detail::Patch& p = *patches_[block];
  p.g()[p.local_index(decomposition_.dims.coord(global))] = value;
}

ScalarField BlockSystem::assemble() const {
  const Dims& dims = decomposition_.dims;
  std::vector<double> out(dims.size());
  for (std::size_t b = 0; b < patches_.size(); ++b) {
    const detail::Patch& p = *patches_[b];
    const auto g = p.g();
    const Box& core = p.core();
    for (std::size_t z = 0; z < core.extent.nz; ++z)
      for (std::size_t y = 0; y < core.extent.ny; ++y) {
        const Coord row{core.lo.x, core.lo.y + y, core.lo.z + z};
        std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(p.local_index(row)), core.extent.nx,
                    out.begin() + static_cast<std::ptrdiff_t>(dims.index(row)));
      }
  }
  std::vector<double> window;
  for (std::size_t b = 0; b < patches_.size(); ++b) {
    const detail::Patch& p = *patches_[b];
    window.resize(p.ext().size());
    detail::gather_box(dims, p.ext(), out, window);
    if (simd::kernels().count_not_equal(window, p.g()) != 0)
      throw InternalError("block " + std::to_string(b) + " holds replicas that disagree with their owners");
  }
  return ScalarField(dims, std::move(out));
}

std::span<const std::uint32_t> BlockSystem::edit_counts(std::size_t block) const {
  return patches_.at(block)->edit_counts();
}

std::span<const double> BlockSystem::block_values(std::size_t block) const {
  return patches_.at(block)->g();
}

std::span<const double> BlockSystem::block_lower(std::size_t block) const {
  return patches_.at(block)->lower();
}

ParallelResult run_parallel(const ScalarField& f, const ScalarField& decompressed,
                            const CorrectionConfig& config, const Dims& block_grid,
                            SyncStrategy strategy, const ParallelOptions& options) {
  const auto t_start = Clock::now();
  if (f.dims() != decompressed.dims())
    throw InputError("dims mismatch: " + f.dims().to_string() + " vs " +
                     decompressed.dims().to_string());
  const BoundsField bounds = compute_bounds(f, config.xi_abs);
  validate_decompressed(f, decompressed, bounds);

  BlockSystem system(f, decompressed, bounds, decompose(f.dims(), block_grid));
  const std::size_t nblocks = system.block_count();
  const auto& k = simd::kernels();

  std::vector<std::vector<double>> previous;
  if (options.check_invariants)
    for (std::size_t b = 0; b < nblocks; ++b) {
      const auto g = system.block_values(b);
      previous.emplace_back(g.begin(), g.end());
    }
  auto check = [&](const char* phase) {
    if (!options.check_invariants) return;
    for (std::size_t b = 0; b < nblocks; ++b) {
      const auto g = system.block_values(b);
      if (k.count_outside(g, system.block_lower(b), previous[b]) != 0)
        throw InternalError(std::string("replica rose or fell below its bound during ") + phase +
                            " in block " + std::to_string(b));
      std::copy(g.begin(), g.end(), previous[b].begin());
      const auto counts = system.edit_counts(b);
      for (std::uint32_t c : counts)
        if (c > config.per_vertex_edit_bound())
          throw InternalError("a replica exceeded the per-vertex edit bound");
    }
  };

  ParallelResult out;
  ParallelStats& stats = out.stats;
  stats.per_block_iterations.assign(nblocks, 0);
  stats.per_block_edits.assign(nblocks, 0);
  std::vector<LocalResult> local(nblocks);

  for (;;) {
    if (stats.rounds >= config.max_outer_iters)
      throw ConvergenceError("parallel correction exceeded " +
                                 std::to_string(config.max_outer_iters) + " rounds",
                             stats.rounds, 0);
    ++stats.rounds;

    auto t0 = Clock::now();
    parallel_for(nblocks, options.workers, [&](std::size_t b) {
      local[b] = system.local_converge(b, config, strategy);
    });
    stats.compute_seconds += seconds_since(t0);
    check("local correction");

    std::size_t round_edits = 0;
    bool settled = true;
    for (std::size_t b = 0; b < nblocks; ++b) {
      stats.per_block_iterations[b] += local[b].iterations;
      stats.per_block_edits[b] += local[b].edits;
      round_edits += local[b].edits;
      settled = settled && local[b].at_fixpoint;
    }
    out.result.edits_per_iteration.push_back(round_edits);

    t0 = Clock::now();
    const bool changed = system.sync_ghosts(options.workers);
    stats.sync_seconds += seconds_since(t0);
    ++stats.syncs;
    if (changed) ++stats.sync_changes;
    check("ghost synchronization");

    if (settled && !changed) break;
  }

  out.result.g = system.assemble();
  out.result.edits = diff_edits(decompressed, out.result.g);
  out.result.iterations = stats.rounds;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const auto counts = system.edit_counts(b);
    if (!counts.empty())
      stats.max_vertex_edits =
          std::max(stats.max_vertex_edits, *std::max_element(counts.begin(), counts.end()));
  }
  out.result.max_vertex_edits = stats.max_vertex_edits;
  stats.edit_count = out.result.edits.size();
  stats.edit_ratio = out.result.edits.edit_ratio();
  stats.total_seconds = seconds_since(t_start);
  return out;
}

}  // namespace pmsz
