#include "pmsz/correction.hpp"

#include <algorithm>
#include <cmath>

#include "pmsz/detail/patch.hpp"
#include "pmsz/errors.hpp"
#include "pmsz/simd/kernels.hpp"

namespace pmsz {
namespace {

void require_same_dims(const ScalarField& a, const ScalarField& b) {
  if (a.dims() != b.dims())
    throw InputError("dims mismatch: " + a.dims().to_string() + " vs " + b.dims().to_string());
}

detail::Patch whole_domain(const ScalarField& f, const BoundsField& bounds,
                           std::span<const double> g) {
  const Box all{{0, 0, 0}, f.dims()};
  return detail::Patch(f.dims(), all, all, f.values(), bounds.lower, g);
}

}  // namespace

std::size_t CorrectionConfig::per_vertex_edit_bound() const {
  return static_cast<std::size_t>(std::ceil(2.0 * xi_abs / tau)) + 1;
}

CorrectionConfig make_config(double xi_abs, double tau, std::size_t max_outer_iters) {
  if (!(xi_abs > 0.0) || !std::isfinite(xi_abs))
    throw InputError("absolute error bound must be positive and finite");
  if (tau < 0.0 || std::isnan(tau)) throw InputError("edit decrement must be positive");
  CorrectionConfig c{xi_abs, tau > 0.0 ? tau : xi_abs / 1024.0, max_outer_iters};
  if (!(c.tau > 0.0) || !(c.tau < 2.0 * xi_abs))
    throw InputError("edit decrement must satisfy 0 < tau < 2 xi");
  if (c.max_outer_iters == 0)
    c.max_outer_iters = 10 * static_cast<std::size_t>(std::ceil(2.0 * xi_abs / c.tau));
  return c;
}

BoundsField compute_bounds(const ScalarField& f, double xi_abs) {
  if (!(xi_abs > 0.0)) throw InputError("absolute error bound must be positive");
  BoundsField b{std::vector<double>(f.size()), std::vector<double>(f.size())};
  const auto& k = simd::kernels();
  k.shift(f.values(), -xi_abs, b.lower);
  k.shift(f.values(), xi_abs, b.upper);
  return b;
}

std::string_view kind_name(DistortionKind kind) noexcept {
  switch (kind) {
    case DistortionKind::FPmax: return "FPmax";
    case DistortionKind::FNmax: return "FNmax";
    case DistortionKind::FPmin: return "FPmin";
    case DistortionKind::FNmin: return "FNmin";
    case DistortionKind::AscOrder: return "AscOrder";
    case DistortionKind::DescOrder: return "DescOrder";
  }
  return "?";
}

std::vector<Distortion> detect_distortions(const ScalarField& f, const ScalarField& g) {
  require_same_dims(f, g);
  // Bounds do not influence detection; f stands in for them.
  const Box all{{0, 0, 0}, f.dims()};
  const detail::Patch patch(f.dims(), all, all, f.values(), f.values(), g.values());
  std::vector<Distortion> out;
  patch.detect([&](const Distortion& d) { out.push_back(d); });
  return out;
}

std::map<VertexId, double> propose_corrections(const ScalarField& f, const ScalarField& g,
                                               const BoundsField& bounds, double tau,
                                               const std::vector<Distortion>& detections) {
  require_same_dims(f, g);
  if (bounds.lower.size() != f.size()) throw InputError("bounds do not match the field");
  const Stencil stencil(f.dims());
  std::map<VertexId, double> out;
  for (const Distortion& d : detections)
    detail::propose_for(d, g.values(), stencil, tau, [&](VertexId t, double v) {
      auto [it, inserted] = out.try_emplace(t, v);
      if (!inserted && v < it->second) it->second = v;
    });
  return out;
}

EditSet diff_edits(const ScalarField& decompressed, const ScalarField& g) {
  require_same_dims(decompressed, g);
  EditSet e;
  e.vertex_count = g.size();
  for (VertexId i = 0; i < g.size(); ++i)
    if (g[i] != decompressed[i]) {
      e.ids.push_back(i);
      e.values.push_back(g[i]);
    }
  return e;
}

ScalarField apply_edits(const ScalarField& decompressed, const EditSet& edits) {
  if (edits.ids.size() != edits.values.size()) throw InputError("edit ids and values differ in length");
  if (edits.vertex_count != 0 && edits.vertex_count != decompressed.size())
    throw InputError("edit set was built for a different vertex count");
  std::vector<double> out(decompressed.values().begin(), decompressed.values().end());
  for (std::size_t k = 0; k < edits.ids.size(); ++k) {
    if (edits.ids[k] >= out.size())
      throw InputError("edit id " + std::to_string(edits.ids[k]) + " out of range");
    out[edits.ids[k]] = edits.values[k];
  }
  return ScalarField(decompressed.dims(), std::move(out));
}

IterationResult correction_iteration(const ScalarField& f, const ScalarField& g,
                                     const BoundsField& bounds, double tau) {
  require_same_dims(f, g);
  detail::Patch patch = whole_domain(f, bounds, g.values());
  const auto step = patch.iterate(tau);
  const auto v = patch.g();
  return {ScalarField(g.dims(), std::vector<double>(v.begin(), v.end())), step.edits};
}

void validate_decompressed(const ScalarField& f, const ScalarField& decompressed,
                           const BoundsField& bounds) {
  require_same_dims(f, decompressed);
  const auto d = decompressed.values();
  if (simd::kernels().count_outside(d, bounds.lower, bounds.upper) == 0) return;
  for (VertexId i = 0; i < d.size(); ++i)
    if (d[i] < bounds.lower[i] || d[i] > bounds.upper[i])
      throw ContractError("decompressed value at vertex " + std::to_string(i) +
                              " is outside [f - xi, f + xi]",
                          i);
}

CorrectionResult run_correction(const ScalarField& f, const ScalarField& decompressed,
                                const CorrectionConfig& config) {
  require_same_dims(f, decompressed);
  const BoundsField bounds = compute_bounds(f, config.xi_abs);
  validate_decompressed(f, decompressed, bounds);

  detail::Patch patch = whole_domain(f, bounds, decompressed.values());
  CorrectionResult result;
  for (;;) {
    const auto step = patch.iterate(config.tau);
    ++result.iterations;
    result.edits_per_iteration.push_back(step.edits);
    if (step.edits == 0) {
      if (step.detections != 0)
        throw ConvergenceError("correction stalled with distortions pinned at their lower bounds",
                               result.iterations, step.detections);
      break;
    }
    if (result.iterations >= config.max_outer_iters)
      throw ConvergenceError("correction exceeded " + std::to_string(config.max_outer_iters) +
                                 " iterations",
                             result.iterations, step.detections);
  }

  const auto g = patch.g();
  result.g = ScalarField(f.dims(), std::vector<double>(g.begin(), g.end()));
  result.edits = diff_edits(decompressed, result.g);
  const auto counts = patch.edit_counts();
  result.max_vertex_edits = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  return result;
}

}  // namespace pmsz
