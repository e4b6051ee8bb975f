#include "pmsz/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmsz/codec.hpp"
#include "pmsz/compressor.hpp"
#include "pmsz/correction.hpp"
#include "pmsz/distributed.hpp"
#include "pmsz/errors.hpp"
#include "pmsz/simd/kernels.hpp"
#include "pmsz/synth.hpp"
#include "pmsz/topology.hpp"

namespace pmsz {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

struct Loaded {
  Bytes bytes;
  ScalarField field;
};

Loaded load_field(const std::string& path) {
  Loaded l{read_file(path), {}};
  l.field = read_field(l.bytes);
  return l;
}

json input_entry(const std::string& path, const Bytes& bytes) {
  return {{"path", path}, {"bytes", bytes.size()}, {"crc32", hex32(crc32(bytes))}};
}

std::size_t raw_bytes(const Loaded& l) {
  // dtype byte sits right after magic and version
  return l.field.size() * (l.bytes[7] == static_cast<std::uint8_t>(DType::F32) ? 4 : 8);
}

json distortion_json(const DistortionReport& r) {
  return {{"fp_max", r.fp_max.size()},
          {"fn_max", r.fn_max.size()},
          {"fp_min", r.fp_min.size()},
          {"fn_min", r.fn_min.size()},
          {"asc_order_violations", r.asc_order_violations.size()},
          {"desc_order_violations", r.desc_order_violations.size()},
          {"wrong_label_count", r.wrong_label_count},
          {"total", r.total()},
          {"all_zero", r.all_zero()}};
}

json compression_json(const CompressionReport& c) {
  return {{"original_bytes", c.original_bytes},
          {"payload_bytes", c.payload_bytes},
          {"edits_bytes", c.edits_bytes},
          {"cr_base", c.cr_base},
          {"cr_with_edits", c.cr_with_edits}};
}

void emit(const json& report, const std::string& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path == "-") {
    out << text;
    return;
  }
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

bool within_bounds(const ScalarField& g, const ScalarField& decompressed, const BoundsField& b) {
  const auto& k = simd::kernels();
  return k.count_outside(g.values(), b.lower, decompressed.values()) == 0;
}

// Error bound taken from the flags that were given.
struct BoundFlags {
  std::optional<double> rel, abs;

  double resolve(const ScalarField& f) const {
    if (abs) return *abs;
    if (rel) return relative_to_absolute(f, *rel);
    throw InputError("one of --rel-eb or --abs-eb is required");
  }
  void add_to(CLI::App* cmd) {
    auto* r = cmd->add_option("--rel-eb", rel, "error bound relative to the value range");
    auto* a = cmd->add_option("--abs-eb", abs, "absolute error bound");
    r->excludes(a);
    a->excludes(r);
  }
};

struct CorrectionRun {
  CorrectionResult result;
  std::optional<ParallelStats> stats;
  double seconds = 0.0;
};

CorrectionRun correct_with(const ScalarField& f, const ScalarField& fhat,
                           const CorrectionConfig& config, const std::string& strategy,
                           const Dims& blocks, std::size_t workers) {
  CorrectionRun run;
  const auto t0 = Clock::now();
  if (strategy == "serial") {
    if (blocks.size() != 1) throw InputError("--strategy serial takes no --blocks");
    run.result = run_correction(f, fhat, config);
  } else {
    auto p = run_parallel(f, fhat, config, blocks, parse_strategy(strategy),
                          ParallelOptions{workers, false});
    run.result = std::move(p.result);
    run.stats = std::move(p.stats);
  }
  run.seconds = seconds_since(t0);
  return run;
}

void add_run_fields(json& r, const CorrectionRun& run, const CorrectionConfig& config) {
  r["edit_count"] = run.result.edits.size();
  r["edit_ratio"] = run.result.edits.edit_ratio();
  r["iterations"] = run.result.iterations;
  r["edits_per_iteration"] = run.result.edits_per_iteration;
  r["max_vertex_edits"] = run.result.max_vertex_edits;
  r["per_vertex_edit_bound"] = config.per_vertex_edit_bound();
  if (run.stats) {
    r["rounds"] = run.stats->rounds;
    r["syncs"] = run.stats->syncs;
    r["sync_changes"] = run.stats->sync_changes;
    r["per_block_iterations"] = run.stats->per_block_iterations;
    r["per_block_edits"] = run.stats->per_block_edits;
    r["timings"] = {{"compute_seconds", run.stats->compute_seconds},
                    {"sync_seconds", run.stats->sync_seconds},
                    {"total_seconds", run.seconds}};
  } else {
    r["rounds"] = run.result.iterations;
    r["syncs"] = 0;
    r["timings"] = {{"total_seconds", run.seconds}};
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  if (out.empty()) throw InputError("empty list '" + text + "'");
  return out;
}

DType parse_dtype(const std::string& s) {
  if (s == "f32") return DType::F32;
  if (s == "f64") return DType::F64;
  throw InputError("unknown dtype '" + s + "' (f32|f64)");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology-preserving correction of lossy-compressed scalar fields"};
  app.name("pmsz");
  app.require_subcommand(1);
  json echo = args;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic field");
  std::string gen_kind = "perlin", gen_dims, gen_out, gen_dtype = "f64";
  std::uint64_t gen_seed = 0;
  double gen_freq = 4.0, gen_value = 0.0;
  unsigned gen_octaves = 3;
  std::vector<double> gen_coef{1.0, 3.0, 0.0};
  gen->add_option("--kind", gen_kind)->check(CLI::IsMember({"perlin", "ramp", "constant"}));
  gen->add_option("--dims", gen_dims, "NXxNY or NXxNYxNZ")->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--freq", gen_freq);
  gen->add_option("--octaves", gen_octaves);
  gen->add_option("--coef", gen_coef, "ramp coefficients a,b,c")->delimiter(',')->expected(3);
  gen->add_option("--value", gen_value, "constant value");
  gen->add_option("--dtype", gen_dtype)->check(CLI::IsMember({"f32", "f64"}));
  gen->add_option("--out", gen_out)->required();

  // compress
  auto* comp = app.add_subcommand("compress", "quantize a field under an error bound");
  std::string comp_in, comp_payload, comp_decomp, comp_report;
  BoundFlags comp_eb;
  comp->add_option("--in", comp_in)->required();
  comp_eb.add_to(comp);
  comp->add_option("--out-payload", comp_payload)->required();
  comp->add_option("--out-decomp", comp_decomp)->required();
  comp->add_option("--report", comp_report);

  // correct
  auto* corr = app.add_subcommand("correct", "correct a decompressed field");
  std::string corr_orig, corr_decomp, corr_edits, corr_report, corr_out, corr_payload;
  std::string corr_blocks = "1x1x1", corr_strategy = "serial";
  BoundFlags corr_eb;
  double corr_tau = 0.0;
  std::size_t corr_workers = 1, corr_max_iters = 0;
  corr->add_option("--orig", corr_orig)->required();
  corr->add_option("--decomp", corr_decomp)->required();
  corr_eb.add_to(corr);
  corr->add_option("--tau", corr_tau, "edit decrement (default xi/1024)");
  corr->add_option("--max-iters", corr_max_iters);
  corr->add_option("--blocks", corr_blocks, "block grid BXxBYxBZ");
  corr->add_option("--strategy", corr_strategy)
      ->check(CLI::IsMember({"serial", "lockstep", "relaxed"}));
  corr->add_option("--workers", corr_workers, "0 = all cores");
  corr->add_option("--edits-out", corr_edits)->required();
  corr->add_option("--report", corr_report)->required();
  corr->add_option("--out", corr_out, "also write the corrected field");
  corr->add_option("--payload", corr_payload, "payload file, for compression ratios");

  // apply
  auto* appl = app.add_subcommand("apply", "apply an edit file to a decompressed field");
  std::string appl_decomp, appl_edits, appl_out;
  appl->add_option("--decomp", appl_decomp)->required();
  appl->add_option("--edits", appl_edits)->required();
  appl->add_option("--out", appl_out)->required();

  // verify
  auto* ver = app.add_subcommand("verify", "compare segmentations of two fields");
  std::string ver_ref, ver_test, ver_report = "-";
  ver->add_option("--ref", ver_ref)->required();
  ver->add_option("--test", ver_test)->required();
  ver->add_option("--report", ver_report);

  // segment
  auto* seg = app.add_subcommand("segment", "write Morse-Smale segmentation labels");
  std::string seg_in, seg_asc, seg_desc;
  seg->add_option("--in", seg_in)->required();
  seg->add_option("--out-asc", seg_asc)->required();
  seg->add_option("--out-desc", seg_desc)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "sweep block grids and strategies");
  std::string bench_orig, bench_decomp, bench_blocks = "1x1x1", bench_strategies = "lockstep,relaxed";
  std::string bench_report = "-";
  BoundFlags bench_eb;
  double bench_tau = 0.0;
  std::size_t bench_workers = 1;
  bench->add_option("--orig", bench_orig)->required();
  bench->add_option("--decomp", bench_decomp)->required();
  bench_eb.add_to(bench);
  bench->add_option("--tau", bench_tau);
  bench->add_option("--sweep-blocks", bench_blocks, "comma-separated block grids");
  bench->add_option("--strategies", bench_strategies, "comma-separated: serial,lockstep,relaxed");
  bench->add_option("--workers", bench_workers, "0 = all cores");
  bench->add_option("--report", bench_report);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*gen) {
    const Dims dims = parse_dims(gen_dims);
    ScalarField f;
    if (gen_kind == "perlin") {
      if (gen_octaves == 0 || !(gen_freq > 0.0)) throw InputError("need --octaves >= 1, --freq > 0");
      f = perlin(NoiseSpec{gen_seed, gen_freq, gen_octaves, dims});
    } else if (gen_kind == "ramp") {
      f = ramp(dims, gen_coef[0], gen_coef[1], gen_coef[2]);
    } else {
      f = ScalarField::filled(dims, gen_value);
    }
    write_file(gen_out, write_field(f, parse_dtype(gen_dtype)));
    return kExitOk;
  }

  if (*comp) {
    const auto t0 = Clock::now();
    const Loaded in = load_field(comp_in);
    const double xi = comp_eb.resolve(in.field);
    const Quantized q = quantize(in.field, xi);
    const Bytes payload = encode_payload(q.payload);
    write_file(comp_payload, payload);
    write_file(comp_decomp, write_field(q.reconstructed));
    if (!comp_report.empty()) {
      json r;
      r["command"] = "compress";
      r["argv"] = echo;
      r["inputs"] = {{"in", input_entry(comp_in, in.bytes)}};
      r["config"] = {{"xi_abs", xi}, {"eb_rel", comp_eb.rel ? json(*comp_eb.rel) : json()}};
      r["dims"] = in.field.dims().to_string();
      r["bit_width"] = q.payload.bit_width;
      r["max_abs_error"] =
          simd::kernels().max_abs_diff(in.field.values(), q.reconstructed.values());
      r["compression"] = compression_json(compression_report(raw_bytes(in), payload.size(), 0));
      r["timings"] = {{"total_seconds", seconds_since(t0)}};
      emit(r, comp_report, out);
    }
    return kExitOk;
  }

  if (*corr) {
    const Loaded f = load_field(corr_orig);
    const Loaded fhat = load_field(corr_decomp);
    if (f.field.dims() != fhat.field.dims())
      throw InputError("dims mismatch: " + f.field.dims().to_string() + " vs " +
                       fhat.field.dims().to_string());
    const double xi = corr_eb.resolve(f.field);
    const CorrectionConfig config = make_config(xi, corr_tau, corr_max_iters);
    const Dims blocks = corr_strategy == "serial" && corr_blocks == "1x1x1"
                            ? Dims{1, 1, 1}
                            : parse_dims(corr_blocks);
    const BoundsField bounds = compute_bounds(f.field, xi);
    validate_decompressed(f.field, fhat.field, bounds);

    const DistortionReport before = compare_plmss(f.field, fhat.field);
    const CorrectionRun run =
        correct_with(f.field, fhat.field, config, corr_strategy, blocks, corr_workers);
    const DistortionReport after = compare_plmss(f.field, run.result.g);

    const Bytes edits = encode_edits(run.result.edits, config.xi_abs, config.tau);
    write_file(corr_edits, edits);
    if (!corr_out.empty()) write_file(corr_out, write_field(run.result.g));

    json r;
    r["command"] = "correct";
    r["argv"] = echo;
    r["inputs"] = {{"orig", input_entry(corr_orig, f.bytes)},
                   {"decomp", input_entry(corr_decomp, fhat.bytes)}};
    r["config"] = {{"xi_abs", config.xi_abs},
                   {"eb_rel", corr_eb.rel ? json(*corr_eb.rel) : json()},
                   {"tau", config.tau},
                   {"max_outer_iters", config.max_outer_iters},
                   {"block_grid", blocks.to_string()},
                   {"strategy", corr_strategy},
                   {"workers", corr_workers},
                   {"isa", std::string(simd::isa_name(simd::kernels().isa))}};
    r["dims"] = f.field.dims().to_string();
    r["vertices"] = f.field.size();
    r["distortions_before"] = distortion_json(before);
    r["distortions"] = distortion_json(after);
    add_run_fields(r, run, config);
    r["edits_bytes"] = edits.size();
    r["bound_ok"] = within_bounds(run.result.g, fhat.field, bounds);
    r["max_abs_error"] = simd::kernels().max_abs_diff(f.field.values(), run.result.g.values());
    if (!corr_payload.empty()) {
      const Bytes payload = read_file(corr_payload);
      r["compression"] =
          compression_json(compression_report(raw_bytes(f), payload.size(), edits.size()));
    } else {
      r["compression"] = nullptr;
    }
    emit(r, corr_report, out);
    return kExitOk;
  }

  if (*appl) {
    const Loaded fhat = load_field(appl_decomp);
    DecodedEdits d = decode_edits(read_file(appl_edits));
    d.edits.vertex_count = fhat.field.size();
    write_file(appl_out, write_field(apply_edits(fhat.field, d.edits)));
    return kExitOk;
  }

  if (*ver) {
    const Loaded ref = load_field(ver_ref);
    const Loaded test = load_field(ver_test);
    json r;
    r["command"] = "verify";
    r["argv"] = echo;
    r["inputs"] = {{"ref", input_entry(ver_ref, ref.bytes)},
                   {"test", input_entry(ver_test, test.bytes)}};
    r["dims"] = ref.field.dims().to_string();
    r["distortions"] = distortion_json(compare_plmss(ref.field, test.field));
    r["max_abs_diff"] = ref.field.dims() == test.field.dims()
                            ? simd::kernels().max_abs_diff(ref.field.values(), test.field.values())
                            : 0.0;
    emit(r, ver_report, out);
    return kExitOk;
  }

  if (*seg) {
    const Loaded in = load_field(seg_in);
    const SegmentationLabels labels = compute_segmentation(in.field);
    write_file(seg_asc, write_labels(in.field.dims(), labels.asc_target));
    write_file(seg_desc, write_labels(in.field.dims(), labels.desc_target));
    return kExitOk;
  }

  if (*bench) {
    const Loaded f = load_field(bench_orig);
    const Loaded fhat = load_field(bench_decomp);
    if (f.field.dims() != fhat.field.dims()) throw InputError("dims mismatch");
    double xi;
    std::string xi_source = "flag";
    if (bench_eb.abs || bench_eb.rel) {
      xi = bench_eb.resolve(f.field);
    } else {
      xi = simd::kernels().max_abs_diff(f.field.values(), fhat.field.values());
      xi_source = "max_abs_diff";
      if (!(xi > 0.0)) throw InputError("fields are identical; pass --abs-eb or --rel-eb");
    }
    const CorrectionConfig config = make_config(xi, bench_tau);
    const BoundsField bounds = compute_bounds(f.field, xi);
    validate_decompressed(f.field, fhat.field, bounds);
    const std::size_t workers =
        bench_workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : bench_workers;

    const CorrectionRun serial =
        correct_with(f.field, fhat.field, config, "serial", Dims{1, 1, 1}, 1);
    json runs = json::array();
    for (const std::string& strategy : split_list(bench_strategies)) {
      for (const std::string& grid : split_list(bench_blocks)) {
        const Dims blocks = parse_dims(grid);
        if (strategy == "serial" && blocks.size() != 1) continue;
        const CorrectionRun run =
            strategy == "serial" ? serial
                                 : correct_with(f.field, fhat.field, config, strategy, blocks, workers);
        json r;
        r["strategy"] = strategy;
        r["block_grid"] = blocks.to_string();
        r["workers"] = strategy == "serial" ? 1 : workers;
        add_run_fields(r, run, config);
        r["distortions"] = distortion_json(compare_plmss(f.field, run.result.g));
        r["bound_ok"] = within_bounds(run.result.g, fhat.field, bounds);
        r["matches_serial"] = run.result.g == serial.result.g;
        const double p = static_cast<double>(r["workers"].get<std::size_t>());
        r["speedup"] = serial.seconds / run.seconds;
        r["efficiency"] = serial.seconds / (p * run.seconds);
        runs.push_back(std::move(r));
      }
    }
    json r;
    r["command"] = "bench";
    r["argv"] = echo;
    r["inputs"] = {{"orig", input_entry(bench_orig, f.bytes)},
                   {"decomp", input_entry(bench_decomp, fhat.bytes)}};
    r["config"] = {{"xi_abs", xi},
                   {"xi_source", xi_source},
                   {"tau", config.tau},
                   {"max_outer_iters", config.max_outer_iters},
                   {"isa", std::string(simd::isa_name(simd::kernels().isa))}};
    r["dims"] = f.field.dims().to_string();
    r["serial_seconds"] = serial.seconds;
    r["runs"] = std::move(runs);
    emit(r, bench_report, out);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ContractError& e) {
    err << "pmsz: contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const InputError& e) {
    err << "pmsz: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "pmsz: format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const ConvergenceError& e) {
    err << "pmsz: " << e.what() << " (" << e.iterations() << " iterations, " << e.remaining()
        << " distortions left)\n";
    return kExitConvergence;
  } catch (const std::exception& e) {
    err << "pmsz: internal error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace pmsz
