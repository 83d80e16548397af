// moa: verify, benchmark, render and plan blocked MoA matrix products.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

std::vector<moa::cli::BlockShape> parse_blocks(const std::vector<std::string>& specs) {
  std::vector<moa::cli::BlockShape> out;
  for (const auto& s : specs) {
    const auto x = s.find('x');
    if (x == std::string::npos)
      throw CLI::ValidationError("--blocks", "expected ROWSxCOLS, got '" + s + "'");
    try {
      out.emplace_back(std::stoll(s.substr(0, x)), std::stoll(s.substr(x + 1)));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--blocks", "expected ROWSxCOLS, got '" + s + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mathematics of Arrays matrix-multiplication toolkit"};
  app.require_subcommand(1);

  moa::cli::VerifyCommand verify;
  auto* verify_cmd = app.add_subcommand("verify", "check every GEMM route against the naive oracle");
  verify_cmd->add_option("--max-dim", verify.max_dim, "largest m, n and p checked")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify.seed, "random seed");
  verify_cmd->add_option("--draws", verify.draws, "random matrix pairs per shape")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--inject-fault", verify.inject_fault,
                       "perturb blocked offsets by one (mutation smoke test)")
      ->group("");

  moa::cli::BenchCommand bench;
  bench.sizes = {256, 512, 1024};
  std::vector<std::string> block_specs{"32x32", "64x64"};
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "time naive, contiguous and blocked kernels");
  bench_cmd->add_option("--sizes", bench.sizes, "square matrix sides N")->delimiter(',');
  bench_cmd->add_option("--blocks", block_specs, "block shapes ROWSxCOLS")->delimiter(',');
  bench_cmd->add_option("--trials", bench.trials, "timed trials per configuration (>= 3)");
  bench_cmd->add_option("--seed", bench.seed, "random seed");
  bench_cmd->add_option("--out", bench_out, "CSV output path (default: stdout)");
  bench_cmd->add_flag("--skip-verify", bench.skip_verify, "time kernels without the oracle preflight");
  bench_cmd->add_flag("--parallel", bench.parallel, "run the row-lifted kernel on several threads");
  bench_cmd->add_option("--threads", bench.threads, "threads for --parallel (0: all cores)");

  moa::cli::RenderCommand render;
  std::string variant = "ip";
  std::string render_out;
  auto* render_cmd = app.add_subcommand("render", "print the C source of a derived loop nest");
  render_cmd->add_option("variant", variant, "ip, ip_rows, ip_cols or blocked")
      ->check(CLI::IsMember({"ip", "ip_rows", "ip_cols", "blocked"}));
  render_cmd->add_option("--m", render.m, "rows of A and C");
  render_cmd->add_option("--n", render.n, "columns of A, rows of B");
  render_cmd->add_option("--p", render.p, "columns of B and C");
  render_cmd->add_option("--np", render.np, "row partitions (ip_rows)");
  render_cmd->add_option("--rsize", render.rsize, "column group size (ip_cols)");
  render_cmd->add_option("--bi", render.bi, "block rows (blocked)");
  render_cmd->add_option("--bk", render.bk, "block depth (blocked)");
  render_cmd->add_option("--bj", render.bj, "block columns (blocked)");
  render_cmd->add_flag("--pragmas", render.pragmas, "emit #pragma acc above parallel loops");
  render_cmd->add_option("--out", render_out, "output file (default: stdout)");

  moa::cli::PlanCommand plan;
  std::string hw = "v100-16g";
  std::string elem = "f64";
  std::int64_t l1_budget = 0;
  auto* plan_cmd = app.add_subcommand("plan", "select a block size for a hardware shape");
  plan_cmd->add_option("--hw", hw, "preset name (v100-16g, v100-32g) or JSON config path");
  plan_cmd->add_option("--elem", elem, "element type")->check(CLI::IsMember({"f32", "f64"}));
  plan_cmd->add_option("--l1-budget", l1_budget, "override the L1 working budget in bytes");
  plan_cmd->add_option("--share-divisor", plan.global_share_divisor,
                       "devices sharing global memory for the threshold budget");
  plan_cmd->add_option("--matrices", plan.n_matrices, "matrices in the working set");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify_cmd) return moa::cli::run_verify(verify, std::cout);
    if (*bench_cmd) {
      bench.blocks = parse_blocks(block_specs);
      if (!bench_out.empty()) bench.out = bench_out;
      return moa::cli::run_bench(bench, std::cout);
    }
    if (*render_cmd) {
      render.variant = moa::cli::parse_variant(variant);
      if (!render_out.empty()) render.out = render_out;
      return moa::cli::run_render(render, std::cout);
    }
    if (*plan_cmd) {
      plan.hw = moa::cli::resolve_hardware(hw);
      plan.elem_bytes = elem == "f64" ? 8 : 4;
      if (l1_budget > 0) plan.l1_budget_override = l1_budget;
      return moa::cli::run_plan(plan, std::cout);
    }
  } catch (const moa::Error& e) {
    std::cerr << "error (" << moa::to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
