#include <random>

#include <gtest/gtest.h>

#include "moa/loop_nest.hpp"
#include "support/oracles.hpp"

namespace moa::ir {
namespace {

using Ints = std::vector<std::int64_t>;
using extent_t = std::int64_t;

Ints run(const LoopNest& nest, const Ints& a, const Ints& b, std::size_t c_size) {
  Ints c(c_size, 0);
  eval_nest<std::int64_t>(nest, a, b, c);
  return c;
}

TEST(ExprTest, EvaluateAndRender) {
  const auto e = sym("j") + sym("i") * sym("sizer");
  EXPECT_EQ(e.evaluate({{"i", 2}, {"j", 3}, {"sizer", 5}}), 13);
  EXPECT_EQ(e.to_c(), "j+i*sizer");
  EXPECT_EQ(((sym("i") * sym("shr0")).group() + sym("sigma")).to_c(), "(i*shr0)+sigma");
  EXPECT_EQ(((sym("a") + sym("b")) * sym("c")).to_c(), "(a+b)*c");
  EXPECT_EQ((sym("sizel") / sym("np")).group().to_c(), "(sizel/np)");
}

TEST(ExprTest, DivisionTruncatesAndRejectsZero) {
  EXPECT_EQ((lit(7) / lit(2)).evaluate({}), 3);
  EXPECT_EQ((lit(-7) / lit(2)).evaluate({}), -3);
  EXPECT_THROW((void)(lit(1) / sym("z")).evaluate({{"z", 0}}), Error);
}

TEST(ExprTest, UnboundSymbol) {
  try {
    (void)sym("q").evaluate({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unbound_parameter);
  }
}

TEST(ExprTest, SubstituteAndSymbols) {
  const auto e = sym("i") * sym("n") + sym("k");
  const auto s = e.substitute("i", sym("ii") + lit(4) * sym("ib"));
  EXPECT_EQ(s.symbols(), (std::set<std::string, std::less<>>{"ib", "ii", "k", "n"}));
  EXPECT_EQ(s.evaluate({{"ii", 1}, {"ib", 2}, {"n", 3}, {"k", 1}}), (1 + 8) * 3 + 1);
}

TEST(AffineTest, NormalizesProductsOfParameters) {
  const auto e = (sym("ip") + (sym("sizel") / sym("np")) * sym("k")) * sym("shr0") + sym("sigma");
  const auto aff = to_affine(e, {{"sizel", 8}, {"np", 2}, {"shr0", 3}});
  EXPECT_EQ(aff.coefficient("ip"), 3);
  EXPECT_EQ(aff.coefficient("k"), 12);
  EXPECT_EQ(aff.coefficient("sigma"), 1);
  EXPECT_EQ(aff.constant, 0);
  EXPECT_EQ(aff.evaluate({{"ip", 1}, {"k", 1}, {"sigma", 2}}), 17);
}

TEST(AffineTest, RejectsNonAffine) {
  EXPECT_THROW((void)to_affine(sym("i") * sym("j"), {}), Error);
  EXPECT_THROW((void)to_affine(sym("i") / lit(2), {}), Error);
}

TEST(GemmNestTest, StructureAndParameters) {
  const auto nest = build_gemm_nest(2, 3, 4);
  ASSERT_EQ(nest.loops.size(), 3u);
  EXPECT_EQ(nest.loops[0].var, "i");
  EXPECT_EQ(nest.loops[1].var, "sigma");
  EXPECT_EQ(nest.loops[2].var, "j");
  const auto env = nest.bindings();
  EXPECT_EQ(nest.loops[0].extent.evaluate(env), 2);
  EXPECT_EQ(nest.loops[1].extent.evaluate(env), 3);
  EXPECT_EQ(nest.loops[2].extent.evaluate(env), 4);
  EXPECT_EQ(env.at("sizeres"), 8);
  EXPECT_EQ(env.at("np"), 1);
  EXPECT_EQ(iteration_count(nest), 24);
  EXPECT_NO_THROW(validate(nest));
}

TEST(GemmNestTest, AccessOffsets) {
  const extent_t m = 2, n = 3, p = 4;
  const auto trace = trace_nest(build_gemm_nest(m, n, p));
  ASSERT_EQ(trace.size(), 24u);
  for (const auto& r : trace) {
    const auto i = r.loop_values[0], sigma = r.loop_values[1], j = r.loop_values[2];
    EXPECT_EQ(r.out, j + i * p);
    EXPECT_EQ(r.left, i * n + sigma);
    EXPECT_EQ(r.right, sigma * p + j);
  }
  // Execution order is (i, sigma, j), j fastest.
  EXPECT_EQ(trace[1].loop_values, (Ints{0, 0, 1}));
  EXPECT_EQ(trace[4].loop_values, (Ints{0, 1, 0}));
}

TEST(GemmNestTest, EvaluatesToTripleLoopProduct) {
  std::mt19937_64 rng(5);
  for (extent_t m = 1; m <= 8; ++m)
    for (extent_t n = 1; n <= 8; ++n)
      for (extent_t p = 1; p <= 8; ++p) {
        const auto a = testing::random_ints(rng, m * n);
        const auto b = testing::random_ints(rng, n * p);
        ASSERT_EQ(run(build_gemm_nest(m, n, p), a, b, static_cast<std::size_t>(m * p)),
                  testing::triple_loop_product(a, b, m, n, p))
            << m << "," << n << "," << p;
      }
}

TEST(GemmNestTest, AccumulatesIntoExistingC) {
  const std::vector<double> a{1, 2, 3, 4}, b{5, 6, 7, 8};
  std::vector<double> c(4, 0.0);
  const auto nest = build_gemm_nest(2, 2, 2);
  eval_nest<double>(nest, a, b, c);
  eval_nest<double>(nest, a, b, c);
  EXPECT_EQ(c, (std::vector<double>{38, 44, 86, 100}));
}

TEST(CompiledNestTest, ReusableAndAffineForms) {
  const CompiledNest nest(build_gemm_nest(2, 3, 4));
  EXPECT_EQ(nest.out().coef, (Ints{4, 0, 1}));
  EXPECT_EQ(nest.left().coef, (Ints{3, 1, 0}));
  EXPECT_EQ(nest.right().coef, (Ints{0, 4, 1}));
  std::mt19937_64 rng(67);
  for (int draw = 0; draw < 3; ++draw) {
    const auto a = testing::random_ints(rng, 6), b = testing::random_ints(rng, 12);
    Ints c(8, 0);
    nest.eval<std::int64_t>(a, b, c);
    EXPECT_EQ(c, testing::triple_loop_product(a, b, 2, 3, 4));
  }
  Ints small(7, 0);
  EXPECT_THROW(nest.eval<std::int64_t>(Ints(6, 1), Ints(12, 1), small), Error);
}

TEST(GemmNestTest, ZeroRowsLeavesCUntouched) {
  Ints c{7, 7};
  eval_nest<std::int64_t>(build_gemm_nest(0, 2, 2), Ints{}, Ints{1, 2, 3, 4}, c);
  EXPECT_EQ(c, (Ints{7, 7}));
  EXPECT_EQ(iteration_count(build_gemm_nest(0, 2, 2)), 0);
}

TEST(GemmNestTest, Errors) {
  try {
    (void)build_gemm_nest(-1, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::negative_extent);
  }
  Ints small(3, 0);
  try {
    eval_nest<std::int64_t>(build_gemm_nest(2, 2, 2), Ints(4, 1), Ints(4, 1), small);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::out_of_bounds);
  }
}

TEST(ValidateTest, UnknownSymbolAndCollisions) {
  auto nest = build_gemm_nest(2, 2, 2);
  nest.body.left = nest.body.left + sym("ghost");
  try {
    validate(nest);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_variable);
  }
  try {
    (void)with_param(build_gemm_nest(2, 2, 2), "np", 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::name_collision);
  }
}

TEST(RenderTest, GemmNestListing) {
  const auto text = render_c(build_gemm_nest(4, 4, 4), {});
  EXPECT_EQ(text,
            "void ip(double *C, double *A, double *B,\n"
            "  int sizel, int sizer, int sizeres, int np, int shr0)\n"
            "{\n"
            "  int i, sigma, j;\n"
            "  for (i = 0; i < sizel; i++) {\n"
            "    for (sigma = 0; sigma < shr0; sigma++) {\n"
            "      for (j = 0; j < sizer; j++) {\n"
            "        C[j+i*sizer] = C[j+i*sizer] + A[(i*shr0)+sigma]*B[(sigma*sizer)+j];\n"
            "      }\n"
            "    }\n"
            "  }\n"
            "}\n");
}

TEST(RenderTest, NameCollisionWithArrays) {
  auto nest = build_gemm_nest(2, 2, 2);
  nest.loops[2].var = "B";
  nest.body.out = nest.body.out.substitute("j", sym("B"));
  nest.body.right = nest.body.right.substitute("j", sym("B"));
  try {
    (void)render_c(nest, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::name_collision);
  }
}

TEST(RenderTest, PragmaForUnknownLoop) {
  RenderOptions opt;
  opt.pragmas = {{"zz", "#pragma omp parallel for"}};
  try {
    (void)render_c(build_gemm_nest(2, 2, 2), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_variable);
  }
}

}  // namespace
}  // namespace moa::ir
