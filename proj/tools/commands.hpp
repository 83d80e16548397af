#pragma once

// Implementations of the moa CLI subcommands. Each run_* function writes its
// report to `out` and returns the process exit status.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moa/cost_model.hpp"
#include "moa/loop_nest.hpp"

namespace moa::cli {

struct VerifyCommand {
  std::int64_t max_dim = 6;
  std::uint64_t seed = 42;
  int draws = 1;
  bool inject_fault = false;
};

int run_verify(const VerifyCommand& cmd, std::ostream& out);

using BlockShape = std::pair<std::int64_t, std::int64_t>;

/// One CSV row. Block is absent for the unblocked kernels.
struct BenchRecord {
  std::string kernel;
  std::int64_t m = 0, n = 0, p = 0;
  std::optional<BlockShape> block;
  int trials = 0;
  double wall_seconds = 0.0;  // median per trial
  double checksum = 0.0;      // sum of C components
};

inline constexpr const char* bench_csv_header =
    "kernel,m,n,p,block_rows,block_cols,trials,wall_seconds,checksum";

struct BenchCommand {
  std::vector<std::int64_t> sizes;
  std::vector<BlockShape> blocks;
  int trials = 3;
  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> out;
  bool skip_verify = false;
  /// Replace the sequential contiguous kernel by the row-lifted kernel
  /// running its partitions on `threads` threads.
  bool parallel = false;
  int threads = 0;  // 0: hardware concurrency
};

/// A (rows, cols) block maps to block extents bi = rows, bk = cols,
/// bj = cols: A blocks are rows x cols, B blocks cols x cols.
std::vector<BenchRecord> run_benchmarks(const BenchCommand& cmd);
void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);
int run_bench(const BenchCommand& cmd, std::ostream& out);

enum class Variant { ip, ip_rows, ip_cols, blocked };

Variant parse_variant(const std::string& name);

struct RenderCommand {
  Variant variant = Variant::ip;
  std::int64_t m = 64, n = 64, p = 64;
  std::int64_t np = 4;
  std::int64_t rsize = 8;
  std::int64_t bi = 32, bk = 32, bj = 32;
  bool pragmas = false;
  std::optional<std::filesystem::path> out;
};

ir::LoopNest build_variant(const RenderCommand& cmd);
std::string render_variant(const RenderCommand& cmd);
int run_render(const RenderCommand& cmd, std::ostream& out);

struct PlanCommand {
  HardwareShape hw = HardwareShape::v100_16g();
  std::int64_t elem_bytes = 8;
  std::optional<std::int64_t> l1_budget_override;
  std::int64_t global_share_divisor = 8;
  std::int64_t n_matrices = 3;
};

/// A preset name or a path to a JSON hardware config.
HardwareShape resolve_hardware(const std::string& name_or_path);
int run_plan(const PlanCommand& cmd, std::ostream& out);

}  // namespace moa::cli
