#include "moa/algebra.hpp"

#include "detail.hpp"
#include "moa/kernels.hpp"

namespace moa {

using detail::visit_type;

namespace {

void require_same_type(const DenseArray& l, const DenseArray& r) {
  if (l.element_type() != r.element_type())
    throw Error(ErrorKind::type_mismatch, "operands have different element types");
}

void require_matrix(const DenseArray& a, const char* what) {
  if (a.shape().dimensionality() != 2)
    throw Error(ErrorKind::rank, std::string(what) + " must be a matrix, got shape " +
                                     a.shape().to_string());
}

void require_row_major(const DenseArray& a) {
  if (a.layout() != Layout::row_major)
    throw Error(ErrorKind::invalid_argument, "matrix product expects row-major operands");
}

ElementType type_of(const Scalar& s) {
  return std::holds_alternative<double>(s) ? ElementType::f64 : ElementType::i64;
}

}  // namespace

bool has_identity(ScalarOp op) noexcept { return op != ScalarOp::sub; }

DenseArray pointwise(ScalarOp f, const DenseArray& l, const DenseArray& r) {
  if (l.shape() != r.shape())
    throw Error(ErrorKind::shape_mismatch, "pointwise operands have shapes " +
                                               l.shape().to_string() + " and " +
                                               r.shape().to_string());
  require_same_type(l, r);
  if (l.layout() != r.layout())
    throw Error(ErrorKind::invalid_argument, "pointwise operands have different layouts");
  // Equal shapes and layouts mean equal gamma, so psi distributes over f
  // offset by offset.
  return visit_type(l, [&]<typename T>(T) {
    auto a = l.data<T>();
    auto b = r.data<T>();
    std::vector<T> out(a.size());
    for (std::size_t o = 0; o < a.size(); ++o) out[o] = apply<T>(f, a[o], b[o]);
    return DenseArray(l.shape(), std::move(out), l.layout());
  });
}

DenseArray scalar_extend(ScalarOp f, const Scalar& s, const DenseArray& a) {
  if (type_of(s) != a.element_type())
    throw Error(ErrorKind::type_mismatch, "scalar and array have different element types");
  return visit_type(a, [&]<typename T>(T) {
    const T v = std::get<T>(s);
    auto src = a.data<T>();
    std::vector<T> out(src.size());
    for (std::size_t o = 0; o < src.size(); ++o) out[o] = apply<T>(f, v, src[o]);
    return DenseArray(a.shape(), std::move(out), a.layout());
  });
}

DenseArray outer(ScalarOp f, const DenseArray& l, const DenseArray& r) {
  require_same_type(l, r);
  auto lr = relayout(l, Layout::row_major);
  auto rr = relayout(r, Layout::row_major);
  return visit_type(l, [&]<typename T>(T) {
    auto a = lr.data<T>();
    auto b = rr.data<T>();
    std::vector<T> out;
    out.reserve(a.size() * b.size());
    for (T x : a)
      for (T y : b) out.push_back(apply<T>(f, x, y));
    return DenseArray(l.shape().concat(r.shape()), std::move(out));
  });
}

DenseArray reduce(ScalarOp f, const DenseArray& a) {
  if (a.shape().is_scalar())
    throw Error(ErrorKind::rank, "reduce needs an array of rank at least 1");
  if (!has_identity(f))
    throw Error(ErrorKind::invalid_argument, "reduce needs an operation with an identity");
  auto ar = relayout(a, Layout::row_major);
  Shape cell = a.shape().drop(1);
  const extent_t rows = a.shape()[0];
  auto folded = visit_type(a, [&]<typename T>(T) {
    auto src = ar.data<T>();
    const auto width = static_cast<std::size_t>(cell.count());
    std::vector<T> acc(width, identity_of<T>(f));
    for (extent_t k = 0; k < rows; ++k) {
      // psi([k], a) is the contiguous range [k*width, (k+1)*width).
      auto slice = src.subspan(static_cast<std::size_t>(k) * width, width);
      for (std::size_t o = 0; o < width; ++o) acc[o] = apply<T>(f, acc[o], slice[o]);
    }
    return DenseArray(cell, std::move(acc));
  });
  return relayout(folded, a.layout());
}

DenseArray inner(ScalarOp reduce_op, ScalarOp combine, const DenseArray& a,
                 const DenseArray& b, ReadTrace* trace) {
  require_matrix(a, "left operand");
  require_matrix(b, "right operand");
  require_same_type(a, b);
  require_row_major(a);
  require_row_major(b);
  if (!has_identity(reduce_op))
    throw Error(ErrorKind::invalid_argument, "inner product reduction needs an identity");
  const extent_t m = a.shape()[0], n = a.shape()[1], p = b.shape()[1];
  if (b.shape()[0] != n)
    throw Error(ErrorKind::shape_mismatch, "inner extents differ: " +
                                               a.shape().to_string() + " x " +
                                               b.shape().to_string());
  return visit_type(a, [&]<typename T>(T) {
    auto av = a.data<T>();
    auto bv = b.data<T>();
    std::vector<T> c(static_cast<std::size_t>(m * p), identity_of<T>(reduce_op));
    for (extent_t i = 0; i < m; ++i) {
      T* crow = c.data() + i * p;
      for (extent_t k = 0; k < n; ++k) {
        const T s = av[static_cast<std::size_t>(i * n + k)];
        const extent_t row = k * p;
        if (trace != nullptr) {
          auto& step = trace->steps.emplace_back();
          step.i = i;
          step.k = k;
          step.b_offsets.reserve(static_cast<std::size_t>(p));
          for (extent_t j = 0; j < p; ++j) step.b_offsets.push_back(row + j);
        }
        for (extent_t j = 0; j < p; ++j)
          crow[j] = apply<T>(reduce_op, crow[j],
                             apply<T>(combine, s, bv[static_cast<std::size_t>(row + j)]));
      }
    }
    return DenseArray(Shape{m, p}, std::move(c));
  });
}

DenseArray gemm_moa(const DenseArray& a, const DenseArray& b, ReadTrace* trace) {
  return inner(ScalarOp::add, ScalarOp::mul, a, b, trace);
}

DenseArray gemm_naive(const DenseArray& a, const DenseArray& b) {
  require_matrix(a, "left operand");
  require_matrix(b, "right operand");
  require_same_type(a, b);
  require_row_major(a);
  require_row_major(b);
  const extent_t m = a.shape()[0], n = a.shape()[1], p = b.shape()[1];
  if (b.shape()[0] != n)
    throw Error(ErrorKind::shape_mismatch, "inner extents differ: " +
                                               a.shape().to_string() + " x " +
                                               b.shape().to_string());
  return visit_type(a, [&]<typename T>(T) {
    std::vector<T> c(static_cast<std::size_t>(m * p), T{0});
    kernels::naive<T>(a.data<T>(), b.data<T>(), c, {m, n, p});
    return DenseArray(Shape{m, p}, std::move(c));
  });
}

namespace {

// outer(f, A, B) has shape [m,n,p,q]; the Kronecker layout swaps the middle
// axes and merges pairs: result[i*p+k, j*q+l] = outer[i,j,k,l].
DenseArray kronecker_reshape(const DenseArray& o) {
  const extent_t m = o.shape()[0], n = o.shape()[1], p = o.shape()[2], q = o.shape()[3];
  return visit_type(o, [&]<typename T>(T) {
    auto src = o.data<T>();
    std::vector<T> out(src.size());
    std::size_t from = 0;
    for (extent_t i = 0; i < m; ++i)
      for (extent_t j = 0; j < n; ++j)
        for (extent_t k = 0; k < p; ++k)
          for (extent_t l = 0; l < q; ++l)
            out[static_cast<std::size_t>((i * p + k) * (n * q) + j * q + l)] = src[from++];
    return DenseArray(Shape{m * p, n * q}, std::move(out));
  });
}

}  // namespace

DenseArray ipophp(ProductForm form, ScalarOp combine, ScalarOp reduce_op,
                  const DenseArray& a, const DenseArray& b) {
  switch (form) {
    case ProductForm::hadamard:
      // Degenerate outer product: matching indices only, no reduction.
      return pointwise(combine, a, b);
    case ProductForm::inner:
      return inner(reduce_op, combine, a, b);
    case ProductForm::kronecker:
      require_matrix(a, "left operand");
      require_matrix(b, "right operand");
      return kronecker_reshape(outer(combine, a, b));
  }
  throw Error(ErrorKind::invalid_argument, "unknown product form");
}

DenseArray hadamard(const DenseArray& a, const DenseArray& b) {
  require_matrix(a, "left operand");
  if (a.shape() != b.shape())
    throw Error(ErrorKind::shape_mismatch, "hadamard operands have shapes " +
                                               a.shape().to_string() + " and " +
                                               b.shape().to_string());
  return ipophp(ProductForm::hadamard, ScalarOp::mul, ScalarOp::add, a, b);
}

DenseArray kron(const DenseArray& a, const DenseArray& b) {
  return ipophp(ProductForm::kronecker, ScalarOp::mul, ScalarOp::add, a, b);
}

}  // namespace moa
