#include "moa/verify.hpp"

#include <functional>
#include <random>

#include "moa/algebra.hpp"
#include "moa/array.hpp"
#include "moa/kernels.hpp"
#include "moa/lifting.hpp"

namespace moa {

std::string VerifyFailure::describe() const {
  std::string s = check;
  if (m != 0 || n != 0 || p != 0)
    s += " (m,n,p)=(" + std::to_string(m) + "," + std::to_string(n) + "," + std::to_string(p) + ")";
  if (!config.empty()) s += " " + config;
  if (!detail.empty()) s += ": " + detail;
  return s;
}

namespace {

using Matrix = std::vector<std::int64_t>;

std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

Matrix random_matrix(std::mt19937_64& rng, std::int64_t count) {
  std::uniform_int_distribution<std::int64_t> dist(-9, 9);
  Matrix out(static_cast<std::size_t>(count));
  for (auto& v : out) v = dist(rng);
  return out;
}

class Checker {
 public:
  explicit Checker(VerifyReport& report) : report_(report) {}

  void run(const std::string& check, std::int64_t m, std::int64_t n, std::int64_t p,
           const std::string& config, const std::function<Matrix()>& compute,
           const Matrix& expected) {
    try {
      auto got = compute();
      if (got == expected) {
        ++report_.passed;
        return;
      }
      std::size_t at = 0;
      while (at < got.size() && at < expected.size() && got[at] == expected[at]) ++at;
      fail(check, m, n, p, config,
           "first mismatch at offset " + std::to_string(at));
    } catch (const std::exception& e) {
      fail(check, m, n, p, config, e.what());
    }
  }

  void fail(const std::string& check, std::int64_t m, std::int64_t n, std::int64_t p,
            const std::string& config, const std::string& detail) {
    ++report_.failed;
    report_.failures.push_back({check, m, n, p, config, detail});
  }

 private:
  VerifyReport& report_;
};

ir::LoopNest with_offset_fault(ir::LoopNest nest) {
  nest.body.right = nest.body.right + ir::lit(1);
  return nest;
}

Matrix run_nest(const ir::CompiledNest& nest, const Matrix& a, const Matrix& b,
               std::size_t c_size) {
  Matrix c(c_size, 0);
  nest.eval<std::int64_t>(a, b, c);
  return c;
}

void verify_gemm_routes(const VerifyOptions& opt, std::mt19937_64& rng, Checker& check) {
  for (std::int64_t m = 1; m <= opt.max_dim; ++m)
    for (std::int64_t n = 1; n <= opt.max_dim; ++n)
      for (std::int64_t p = 1; p <= opt.max_dim; ++p) {
        // Nests depend only on the shape; build and compile them once per shape.
        std::vector<std::pair<std::string, ir::CompiledNest>> nests;
        nests.emplace_back("", ir::build_gemm_nest(m, n, p));
        for (auto np : divisors(m))
          nests.emplace_back("np=" + std::to_string(np), ir::build_row_lifted(m, n, p, np));
        for (auto rsize : divisors(p))
          nests.emplace_back("rsize=" + std::to_string(rsize), ir::build_col_lifted(m, n, p, rsize));
        std::vector<std::pair<std::string, ir::CompiledNest>> blocked;
        std::vector<kernels::BlockDims> blocks;
        for (auto bi : divisors(m))
          for (auto bk : divisors(n))
            for (auto bj : divisors(p)) {
              auto nest = ir::build_blocked(m, n, p, bi, bk, bj);
              if (opt.inject_fault) nest = with_offset_fault(std::move(nest));
              blocked.emplace_back("block=" + std::to_string(bi) + "x" + std::to_string(bk) + "x" +
                                       std::to_string(bj),
                                   ir::CompiledNest(nest));
              blocks.push_back({bi, bk, bj});
            }

        const auto c_size = static_cast<std::size_t>(m * p);
        for (int draw = 0; draw < opt.draws; ++draw) {
          const Matrix a = random_matrix(rng, m * n);
          const Matrix b = random_matrix(rng, n * p);
          const auto da = DenseArray(Shape{m, n}, a);
          const auto db = DenseArray(Shape{n, p}, b);
          const auto naive = gemm_naive(da, db);
          const auto dexp = naive.data<std::int64_t>();
          const Matrix expected(dexp.begin(), dexp.end());

          check.run("gemm_moa", m, n, p, "", [&] {
            const auto c = gemm_moa(da, db);
            const auto flat = c.data<std::int64_t>();
            return Matrix(flat.begin(), flat.end());
          }, expected);

          for (const auto& [config, nest] : nests) {
            const char* name = config.empty() ? "ip" : config[0] == 'n' ? "ip_rows" : "ip_cols";
            check.run(name, m, n, p, config, [&] { return run_nest(nest, a, b, c_size); }, expected);
          }
          for (const auto& [config, nest] : blocked)
            check.run("ip_blocked", m, n, p, config, [&] { return run_nest(nest, a, b, c_size); },
                      expected);

          check.run("kernel_contiguous", m, n, p, "", [&] {
            Matrix c(c_size, 0);
            kernels::contiguous<std::int64_t>(a, b, c, {m, n, p});
            return c;
          }, expected);
          for (std::size_t k = 0; k < blocks.size(); ++k)
            check.run("kernel_blocked", m, n, p, blocked[k].first, [&] {
              Matrix c(c_size, 0);
              kernels::blocked<std::int64_t>(a, b, c, {m, n, p}, blocks[k]);
              return c;
            }, expected);
          for (auto parts : divisors(m))
            check.run("kernel_rows_parallel", m, n, p, "parts=" + std::to_string(parts), [&] {
              Matrix c(c_size, 0);
              kernels::rows_parallel<std::int64_t>(a, b, c, {m, n, p}, parts);
              return c;
            }, expected);
        }
      }
}

void verify_psi_identity(const VerifyOptions& opt, std::mt19937_64& rng, Checker& check) {
  std::uniform_int_distribution<int> rank_dist(0, 4);
  std::uniform_int_distribution<extent_t> extent_dist(0, 5);
  std::uniform_int_distribution<std::int64_t> value_dist(-100, 100);
  for (int t = 0; t < opt.psi_shapes; ++t) {
    std::vector<extent_t> ext(static_cast<std::size_t>(rank_dist(rng)));
    for (auto& e : ext) e = extent_dist(rng);
    const Shape s(ext);
    Matrix values(static_cast<std::size_t>(s.count()));
    for (auto& v : values) v = value_dist(rng);
    for (auto layout : {Layout::row_major, Layout::col_major}) {
      const DenseArray xi(s, values, layout);
      const std::string config = "shape=" + s.to_string() +
                                 (layout == Layout::row_major ? " row-major" : " col-major");
      // Index xi at every row of iota(shape) and reassemble under its layout.
      check.run("psi_identity", 0, 0, 0, config, [&] {
        const auto indices = iota(s);
        Matrix rebuilt(values.size(), 0);
        for (extent_t r = 0; r < iota_count(indices); ++r) {
          const auto idx = iota_row(indices, r);
          const auto component = psi(idx, xi).scalar_value<std::int64_t>();
          rebuilt[static_cast<std::size_t>(gamma(idx, s, layout))] = component;
        }
        if (iota_count(indices) != s.count()) rebuilt.push_back(0);
        return rebuilt;
      }, values);
    }
  }
}

}  // namespace

VerifyReport verify_all(const VerifyOptions& options) {
  if (options.max_dim < 1)
    throw Error(ErrorKind::invalid_argument, "max_dim must be at least 1");
  VerifyReport report;
  Checker check(report);
  std::mt19937_64 rng(options.seed);
  verify_gemm_routes(options, rng, check);
  verify_psi_identity(options, rng, check);
  return report;
}

}  // namespace moa
