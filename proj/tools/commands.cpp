#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <span>
#include <thread>

#include "moa/algebra.hpp"
#include "moa/kernels.hpp"
#include "moa/lifting.hpp"
#include "moa/verify.hpp"

namespace moa::cli {

int run_verify(const VerifyCommand& cmd, std::ostream& out) {
  VerifyOptions opt;
  opt.max_dim = cmd.max_dim;
  opt.seed = cmd.seed;
  opt.draws = cmd.draws;
  opt.inject_fault = cmd.inject_fault;
  const auto report = verify_all(opt);
  constexpr std::size_t shown = 20;
  for (std::size_t k = 0; k < std::min(shown, report.failures.size()); ++k)
    out << "FAIL " << report.failures[k].describe() << '\n';
  if (report.failures.size() > shown)
    out << "... " << report.failures.size() - shown << " more failures\n";
  out << "verify max_dim=" << cmd.max_dim << " seed=" << cmd.seed << ": " << report.passed
      << " passed, " << report.failed << " failed\n";
  return report.ok() ? 0 : 1;
}

namespace {

using Clock = std::chrono::steady_clock;

kernels::BlockDims block_dims(const BlockShape& b) { return {b.first, b.second, b.second}; }

std::vector<double> random_matrix(std::mt19937_64& rng, std::int64_t count) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = dist(rng);
  return out;
}

template <typename Kernel>
BenchRecord time_kernel(std::string name, std::int64_t size, std::optional<BlockShape> block,
                        int trials, std::span<const double> a, std::span<const double> b,
                        Kernel&& kernel) {
  std::vector<double> c(static_cast<std::size_t>(size * size));
  std::vector<double> seconds;
  for (int t = 0; t < trials; ++t) {
    std::fill(c.begin(), c.end(), 0.0);
    const auto start = Clock::now();
    kernel(a, b, std::span<double>(c));
    const auto stop = Clock::now();
    seconds.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::sort(seconds.begin(), seconds.end());
  BenchRecord rec;
  rec.kernel = std::move(name);
  rec.m = rec.n = rec.p = size;
  rec.block = block;
  rec.trials = trials;
  rec.wall_seconds = std::max(seconds[seconds.size() / 2], 1e-9);
  for (double v : c) rec.checksum += v;
  return rec;
}

std::int64_t partition_count(std::int64_t rows, int threads) {
  std::int64_t best = 1;
  for (std::int64_t d = 1; d <= std::min<std::int64_t>(rows, threads); ++d)
    if (rows % d == 0) best = d;
  return best;
}

void check_bench_args(const BenchCommand& cmd) {
  if (cmd.trials < 3) throw Error(ErrorKind::invalid_argument, "at least 3 trials are required");
  if (cmd.sizes.empty()) throw Error(ErrorKind::invalid_argument, "no sizes given");
  for (auto size : cmd.sizes) {
    if (size <= 0) throw Error(ErrorKind::invalid_argument, "sizes must be positive");
    for (const auto& [r, c] : cmd.blocks) {
      if (r <= 0 || c <= 0) throw Error(ErrorKind::invalid_argument, "blocks must be positive");
      if (size % r != 0 || size % c != 0)
        throw Error(ErrorKind::non_divisible, "block " + std::to_string(r) + "x" +
                                                  std::to_string(c) + " does not divide N=" +
                                                  std::to_string(size));
    }
  }
}

// Oracle check of every kernel configuration the bench will time, on small
// integer problems with the same block extents.
bool preflight(const BenchCommand& cmd, std::ostream& out) {
  VerifyOptions opt;
  opt.max_dim = 4;
  opt.seed = cmd.seed;
  opt.psi_shapes = 20;
  auto report = verify_all(opt);
  std::mt19937_64 rng(cmd.seed);
  std::uniform_int_distribution<std::int64_t> dist(-9, 9);
  for (const auto& blk : cmd.blocks) {
    const auto d = block_dims(blk);
    const kernels::GemmDims dims{2 * d.bi, 2 * d.bk, 2 * d.bj};
    std::vector<std::int64_t> a(static_cast<std::size_t>(dims.m * dims.n));
    std::vector<std::int64_t> b(static_cast<std::size_t>(dims.n * dims.p));
    for (auto& v : a) v = dist(rng);
    for (auto& v : b) v = dist(rng);
    std::vector<std::int64_t> want(static_cast<std::size_t>(dims.m * dims.p), 0), got = want;
    kernels::naive<std::int64_t>(a, b, want, dims);
    kernels::blocked<std::int64_t>(a, b, got, dims, d);
    if (got == want) {
      ++report.passed;
    } else {
      ++report.failed;
      report.failures.push_back({"kernel_blocked", dims.m, dims.n, dims.p,
                                 "block=" + std::to_string(blk.first) + "x" +
                                     std::to_string(blk.second),
                                 "mismatch"});
    }
  }
  for (const auto& f : report.failures) out << "FAIL " << f.describe() << '\n';
  return report.ok();
}

}  // namespace

std::vector<BenchRecord> run_benchmarks(const BenchCommand& cmd) {
  check_bench_args(cmd);
  const int threads =
      cmd.threads > 0 ? cmd.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<BenchRecord> records;
  for (auto size : cmd.sizes) {
    std::mt19937_64 rng(cmd.seed ^ static_cast<std::uint64_t>(size));
    const auto a = random_matrix(rng, size * size);
    const auto b = random_matrix(rng, size * size);
    const kernels::GemmDims dims{size, size, size};

    records.push_back(time_kernel("naive", size, std::nullopt, cmd.trials, a, b,
                                  [&](auto x, auto y, auto z) { kernels::naive<double>(x, y, z, dims); }));
    if (cmd.parallel) {
      const auto parts = partition_count(size, threads);
      records.push_back(time_kernel("moa_rows_parallel", size, std::nullopt, cmd.trials, a, b,
                                    [&](auto x, auto y, auto z) {
                                      kernels::rows_parallel<double>(x, y, z, dims, parts);
                                    }));
    } else {
      records.push_back(time_kernel("moa_contiguous", size, std::nullopt, cmd.trials, a, b,
                                    [&](auto x, auto y, auto z) {
                                      kernels::contiguous<double>(x, y, z, dims);
                                    }));
    }
    for (const auto& blk : cmd.blocks)
      records.push_back(time_kernel("moa_blocked", size, blk, cmd.trials, a, b,
                                    [&](auto x, auto y, auto z) {
                                      kernels::blocked<double>(x, y, z, dims, block_dims(blk));
                                    }));
  }
  return records;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << bench_csv_header << '\n';
  char buf[64];
  for (const auto& r : records) {
    os << r.kernel << ',' << r.m << ',' << r.n << ',' << r.p << ',';
    if (r.block) os << r.block->first << ',' << r.block->second;
    else os << ',';
    std::snprintf(buf, sizeof buf, "%.9g", r.wall_seconds);
    os << ',' << r.trials << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", r.checksum);
    os << ',' << buf << '\n';
  }
}

int run_bench(const BenchCommand& cmd, std::ostream& out) {
  check_bench_args(cmd);
  if (!cmd.skip_verify && !preflight(cmd, out)) {
    out << "kernels failed verification; refusing to time them (use --skip-verify to override)\n";
    return 1;
  }
  const auto records = run_benchmarks(cmd);
  if (cmd.out) {
    std::ofstream file(*cmd.out);
    if (!file) throw Error(ErrorKind::io, "cannot write " + cmd.out->string());
    write_csv(file, records);
    if (!file) throw Error(ErrorKind::io, "error writing " + cmd.out->string());
    for (const auto& r : records) {
      out << r.kernel << " N=" << r.m;
      if (r.block) out << " block=" << r.block->first << "x" << r.block->second;
      out << " median=" << r.wall_seconds << "s checksum=" << r.checksum << '\n';
    }
    out << "wrote " << records.size() << " rows to " << cmd.out->string() << '\n';
  } else {
    write_csv(out, records);
  }
  return 0;
}

Variant parse_variant(const std::string& name) {
  if (name == "ip") return Variant::ip;
  if (name == "ip_rows") return Variant::ip_rows;
  if (name == "ip_cols") return Variant::ip_cols;
  if (name == "blocked") return Variant::blocked;
  throw Error(ErrorKind::invalid_argument, "unknown variant '" + name + "'");
}

ir::LoopNest build_variant(const RenderCommand& cmd) {
  switch (cmd.variant) {
    case Variant::ip: return ir::build_gemm_nest(cmd.m, cmd.n, cmd.p);
    case Variant::ip_rows: return ir::build_row_lifted(cmd.m, cmd.n, cmd.p, cmd.np);
    case Variant::ip_cols: return ir::build_col_lifted(cmd.m, cmd.n, cmd.p, cmd.rsize);
    case Variant::blocked: return ir::build_blocked(cmd.m, cmd.n, cmd.p, cmd.bi, cmd.bk, cmd.bj);
  }
  throw Error(ErrorKind::invalid_argument, "unknown variant");
}

std::string render_variant(const RenderCommand& cmd) {
  const auto nest = build_variant(cmd);
  ir::RenderOptions opt;
  switch (cmd.variant) {
    case Variant::ip: opt.function_name = "ip"; break;
    case Variant::ip_rows: opt.function_name = "ip_rows"; break;
    case Variant::ip_cols: opt.function_name = "ip_cols"; break;
    case Variant::blocked: opt.function_name = "ip_blocked"; break;
  }
  if (cmd.pragmas)
    for (const auto& loop : nest.loops)
      if (loop.parallel) opt.pragmas.emplace_back(loop.var, "#pragma acc parallel loop");
  return ir::render_c(nest, opt);
}

int run_render(const RenderCommand& cmd, std::ostream& out) {
  const auto text = render_variant(cmd);
  if (cmd.out) {
    std::ofstream file(*cmd.out, std::ios::binary);
    if (!file) throw Error(ErrorKind::io, "cannot write " + cmd.out->string());
    file << text;
  } else {
    out << text;
  }
  return 0;
}

HardwareShape resolve_hardware(const std::string& name_or_path) {
  if (name_or_path == "v100-16g" || name_or_path == "v100-32g")
    return hardware_preset(name_or_path);
  return load_hardware(name_or_path);
}

int run_plan(const PlanCommand& cmd, std::ostream& out) {
  HardwareShape hw = cmd.hw;
  if (cmd.l1_budget_override) {
    hw.l1_budget_bytes = *cmd.l1_budget_override;
    hw.l1_full_bytes = std::max(hw.l1_full_bytes, hw.l1_budget_bytes);
  }
  hw.validate();
  const auto plan = select_block(hw, cmd.elem_bytes);
  const char* kind = cmd.elem_bytes == 8 ? "doubles" : "floats";
  const auto b = plan.block_rows;

  out << "hardware: " << hw.name << '\n';
  out << "element: " << (cmd.elem_bytes == 8 ? "f64" : "f32") << " (" << cmd.elem_bytes
      << " bytes)\n";
  out << "L1 budget: " << plan.budget_bytes << " bytes\n";
  out << "block: " << b << "x" << plan.block_cols << " " << kind << '\n';
  out << "bytes per block: " << b << " x " << plan.block_cols << " x " << plan.elem_bytes
      << " = " << plan.bytes_per_block << '\n';
  out << "blocks per SM: " << plan.blocks_per_sm << " (A, B, C)\n";
  out << "total: " << plan.blocks_per_sm << " x " << plan.bytes_per_block << " = "
      << plan.total_bytes << " bytes <= " << plan.budget_bytes << " bytes\n";
  out << "next: " << 2 * b << "x" << 2 * b << " needs "
      << plan.blocks_per_sm * 4 * plan.bytes_per_block << " bytes > " << plan.budget_bytes
      << " bytes\n";
  out << "equal-count shapes (" << plan.components() << " components):";
  for (const auto& [r, c] : enumerate_block_shapes(plan.components())) out << ' ' << r << 'x' << c;
  out << '\n';

  const auto budget = global_share_budget(hw, cmd.global_share_divisor);
  const auto threshold = predict_switch_threshold(budget, cmd.elem_bytes, cmd.n_matrices);
  out << "switch threshold: budget " << budget << " bytes (global " << hw.global_bytes << " / "
      << cmd.global_share_divisor << "), " << cmd.n_matrices << " matrices of " << cmd.elem_bytes
      << "-byte elements\n";
  out << "  N = floor(sqrt(" << budget << " / " << cmd.n_matrices * cmd.elem_bytes
      << ")) = " << threshold << '\n';
  return 0;
}

}  // namespace moa::cli
