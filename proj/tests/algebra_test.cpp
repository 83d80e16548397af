#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "moa/algebra.hpp"
#include "support/oracles.hpp"

namespace moa {
namespace {

std::vector<std::int64_t> flat_ints(const DenseArray& a) {
  const auto d = a.data<std::int64_t>();
  return {d.begin(), d.end()};
}

DenseArray random_int_matrix(std::mt19937_64& rng, extent_t rows, extent_t cols) {
  return DenseArray(Shape{rows, cols}, testing::random_ints(rng, rows * cols));
}

DenseArray random_double_matrix(std::mt19937_64& rng, extent_t rows, extent_t cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(rows * cols));
  for (auto& x : v) x = dist(rng);
  return DenseArray(Shape{rows, cols}, std::move(v));
}

TEST(PointwiseTest, AddAndMultiply) {
  const auto a = DenseArray::vector<std::int64_t>({1, 2, 3});
  const auto b = DenseArray::vector<std::int64_t>({4, 5, 6});
  EXPECT_EQ(flat_ints(pointwise(ScalarOp::add, a, b)), (std::vector<std::int64_t>{5, 7, 9}));
  EXPECT_EQ(flat_ints(pointwise(ScalarOp::mul, a, b)), (std::vector<std::int64_t>{4, 10, 18}));
}

TEST(PointwiseTest, ShapeAndTypeMismatch) {
  const auto a = DenseArray::zeros<double>(Shape{2, 3});
  try {
    (void)pointwise(ScalarOp::add, a, DenseArray::zeros<double>(Shape{3, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape_mismatch);
  }
  try {
    (void)pointwise(ScalarOp::add, a, DenseArray::zeros<std::int64_t>(Shape{2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::type_mismatch);
  }
}

TEST(PointwiseTest, RequiresEqualLayouts) {
  const auto a = DenseArray::matrix<std::int64_t>({{1, 2, 3}, {4, 5, 6}});
  try {
    (void)pointwise(ScalarOp::add, a, relayout(a, Layout::col_major));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
  const auto ac = relayout(a, Layout::col_major);
  EXPECT_EQ(relayout(pointwise(ScalarOp::add, ac, ac), Layout::row_major), pointwise(ScalarOp::add, a, a));
}

// i psi (xi_l f xi_r) == (i psi xi_l) f (i psi xi_r) for prefix indices.
TEST(PointwiseTest, DistributesOverPrefixIndexing) {
  std::mt19937_64 rng(3);
  const Shape s{3, 2, 4};
  const DenseArray l(s, testing::random_ints(rng, s.count()));
  const DenseArray r(s, testing::random_ints(rng, s.count()));
  for (auto op : {ScalarOp::add, ScalarOp::mul, ScalarOp::sub, ScalarOp::max}) {
    const auto whole = pointwise(op, l, r);
    for (const auto& idx : {IndexVector{}, IndexVector{1}, IndexVector{2, 1}, IndexVector{0, 1, 3}})
      EXPECT_EQ(psi(idx, whole), pointwise(op, psi(idx, l), psi(idx, r))) << idx.to_string();
  }
}

TEST(ScalarExtendTest, ExtendsOverEveryComponent) {
  const auto a = DenseArray::matrix<double>({{1, 2}, {3, 4}});
  const auto out = scalar_extend(ScalarOp::mul, Scalar{2.0}, a);
  EXPECT_EQ(out, DenseArray::matrix<double>({{2, 4}, {6, 8}}));
  EXPECT_THROW((void)scalar_extend(ScalarOp::mul, Scalar{std::int64_t{2}}, a), Error);
}

TEST(OuterTest, ShapeIsConcatenation) {
  const auto a = DenseArray::zeros<std::int64_t>(Shape{2, 3});
  const auto b = DenseArray::zeros<std::int64_t>(Shape{4});
  EXPECT_EQ(shape_of(outer(ScalarOp::mul, a, b)), (Shape{2, 3, 4}));
  EXPECT_EQ(shape_of(outer(ScalarOp::mul, DenseArray::scalar(std::int64_t{1}), b)), Shape{4});
}

TEST(OuterTest, ComponentsArePairwiseProducts) {
  const auto a = DenseArray::vector<std::int64_t>({1, 2});
  const auto b = DenseArray::vector<std::int64_t>({3, 4, 5});
  EXPECT_EQ(outer(ScalarOp::mul, a, b), DenseArray::matrix<std::int64_t>({{3, 4, 5}, {6, 8, 10}}));
}

TEST(ReduceTest, FoldsLeadingDimension) {
  const auto a = DenseArray::matrix<std::int64_t>({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(reduce(ScalarOp::add, a), DenseArray::vector<std::int64_t>({5, 7, 9}));
  EXPECT_EQ(reduce(ScalarOp::max, a), DenseArray::vector<std::int64_t>({4, 5, 6}));
  EXPECT_EQ(reduce(ScalarOp::add, DenseArray::vector<std::int64_t>({1, 2, 3})),
            DenseArray::scalar(std::int64_t{6}));
}

TEST(ReduceTest, EmptyLeadingDimensionGivesIdentity) {
  const auto a = DenseArray::zeros<std::int64_t>(Shape{0, 3});
  EXPECT_EQ(reduce(ScalarOp::add, a), DenseArray::vector<std::int64_t>({0, 0, 0}));
  EXPECT_EQ(reduce(ScalarOp::mul, a), DenseArray::vector<std::int64_t>({1, 1, 1}));
  EXPECT_THROW((void)reduce(ScalarOp::sub, a), Error);
}

TEST(GemmTest, SmallExample) {
  const auto a = DenseArray::matrix<std::int64_t>({{1, 2}, {3, 4}});
  const auto b = DenseArray::matrix<std::int64_t>({{5, 6}, {7, 8}});
  EXPECT_EQ(gemm_moa(a, b), DenseArray::matrix<std::int64_t>({{19, 22}, {43, 50}}));
  EXPECT_EQ(gemm_naive(a, b), gemm_moa(a, b));
}

TEST(GemmTest, IntegerBitwiseEqualToTripleLoop) {
  std::mt19937_64 rng(17);
  for (extent_t m = 1; m <= 6; ++m)
    for (extent_t n = 1; n <= 6; ++n)
      for (extent_t p = 1; p <= 6; ++p) {
        const auto a = random_int_matrix(rng, m, n);
        const auto b = random_int_matrix(rng, n, p);
        const auto expected = testing::triple_loop_product(flat_ints(a), flat_ints(b), m, n, p);
        EXPECT_EQ(flat_ints(gemm_moa(a, b)), expected);
        EXPECT_EQ(flat_ints(gemm_naive(a, b)), expected);
      }
}

TEST(GemmTest, DoubleWithinRelativeTolerance) {
  std::mt19937_64 rng(19);
  for (extent_t size : {1, 5, 16, 33}) {
    const auto a = random_double_matrix(rng, size, size + 1);
    const auto b = random_double_matrix(rng, size + 1, size + 2);
    const auto got = gemm_moa(a, b);
    const auto want = gemm_naive(a, b);
    const auto g = got.data<double>();
    const auto w = want.data<double>();
    ASSERT_EQ(g.size(), w.size());
    for (std::size_t k = 0; k < g.size(); ++k)
      EXPECT_LE(std::abs(g[k] - w[k]), 1e-12 * std::max(1.0, std::abs(w[k])));
  }
}

TEST(GemmTest, IdentityIsNeutral) {
  std::mt19937_64 rng(23);
  const auto a = random_int_matrix(rng, 4, 5);
  EXPECT_EQ(gemm_moa(DenseArray::identity<std::int64_t>(4), a), a);
  EXPECT_EQ(gemm_moa(a, DenseArray::identity<std::int64_t>(5)), a);
}

// Row i of C is the sum over k of A[i,k] extended over row k of B.
TEST(GemmTest, RowIsSumOfScaledRows) {
  std::mt19937_64 rng(29);
  const auto a = random_int_matrix(rng, 3, 4);
  const auto b = random_int_matrix(rng, 4, 5);
  const auto c = gemm_moa(a, b);
  for (extent_t i = 0; i < 3; ++i) {
    auto row = DenseArray::zeros<std::int64_t>(Shape{5});
    for (extent_t k = 0; k < 4; ++k)
      row = pointwise(ScalarOp::add, row,
                      scalar_extend(ScalarOp::mul, Scalar{psi({i, k}, a).scalar_value<std::int64_t>()},
                                    psi({k}, b)));
    EXPECT_EQ(psi({i}, c), row);
  }
}

TEST(GemmTest, EmptyDimensions) {
  const auto a = DenseArray::zeros<std::int64_t>(Shape{3, 0});
  const auto b = DenseArray::zeros<std::int64_t>(Shape{0, 2});
  EXPECT_EQ(gemm_moa(a, b), DenseArray::zeros<std::int64_t>(Shape{3, 2}));
  EXPECT_EQ(shape_of(gemm_moa(DenseArray::zeros<std::int64_t>(Shape{0, 4}),
                              DenseArray::zeros<std::int64_t>(Shape{4, 2}))),
            (Shape{0, 2}));
}

TEST(GemmTest, Errors) {
  const auto a = DenseArray::zeros<double>(Shape{2, 3});
  try {
    (void)gemm_moa(a, DenseArray::zeros<double>(Shape{2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape_mismatch);
  }
  try {
    (void)gemm_moa(DenseArray::zeros<double>(Shape{6}), a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::rank);
  }
}

// Within one (i, k) step the B reads are one consecutive run over row k.
TEST(GemmTest, ReadsOfBAreContiguousRows) {
  std::mt19937_64 rng(31);
  const extent_t m = 3, n = 4, p = 5;
  ReadTrace trace;
  (void)gemm_moa(random_int_matrix(rng, m, n), random_int_matrix(rng, n, p), &trace);
  ASSERT_EQ(trace.steps.size(), static_cast<std::size_t>(m * n));
  for (const auto& step : trace.steps) {
    ASSERT_EQ(step.b_offsets.size(), static_cast<std::size_t>(p));
    for (extent_t j = 0; j < p; ++j) EXPECT_EQ(step.b_offsets[static_cast<std::size_t>(j)], step.k * p + j);
  }
}

TEST(ProductFamilyTest, HadamardIsPointwiseProduct) {
  const auto a = DenseArray::matrix<std::int64_t>({{1, 2}, {3, 4}});
  const auto b = DenseArray::matrix<std::int64_t>({{5, 6}, {7, 8}});
  EXPECT_EQ(hadamard(a, b), DenseArray::matrix<std::int64_t>({{5, 12}, {21, 32}}));
  EXPECT_EQ(ipophp(ProductForm::hadamard, ScalarOp::mul, ScalarOp::add, a, b), hadamard(a, b));
}

TEST(ProductFamilyTest, InnerFormIsMatrixProduct) {
  std::mt19937_64 rng(37);
  const auto a = random_int_matrix(rng, 3, 4);
  const auto b = random_int_matrix(rng, 4, 2);
  EXPECT_EQ(ipophp(ProductForm::inner, ScalarOp::mul, ScalarOp::add, a, b), gemm_naive(a, b));
}

TEST(ProductFamilyTest, KroneckerMatchesDefinition) {
  std::mt19937_64 rng(41);
  for (const auto& [m, n, p, q] : std::vector<std::array<extent_t, 4>>{{2, 3, 2, 2}, {1, 4, 3, 1}, {3, 3, 2, 5}}) {
    const auto a = random_int_matrix(rng, m, n);
    const auto b = random_int_matrix(rng, p, q);
    const auto k = kron(a, b);
    EXPECT_EQ(shape_of(k), (Shape{m * p, n * q}));
    EXPECT_EQ(flat_ints(k), testing::kronecker_definition(flat_ints(a), m, n, flat_ints(b), p, q));
    EXPECT_EQ(ipophp(ProductForm::kronecker, ScalarOp::mul, ScalarOp::add, a, b), k);
  }
}

TEST(ProductFamilyTest, MaxPlusInnerProduct) {
  const auto a = DenseArray::matrix<std::int64_t>({{0, 3}, {2, 1}});
  const auto b = DenseArray::matrix<std::int64_t>({{1, 0}, {4, 2}});
  // C[i,j] = max_k (A[i,k] + B[k,j]).
  EXPECT_EQ(inner(ScalarOp::max, ScalarOp::add, a, b),
            DenseArray::matrix<std::int64_t>({{7, 5}, {5, 3}}));
}

}  // namespace
}  // namespace moa
