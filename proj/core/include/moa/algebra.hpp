#pragma once

// Scalar extension, outer product, reduction and the inner-product family.
// Hadamard, matrix product and Kronecker product are all instantiations of
// one routine, ipophp().

#include <cstdint>
#include <limits>
#include <vector>

#include "moa/array.hpp"

namespace moa {

enum class ScalarOp { add, mul, sub, max, min };

template <Element T>
constexpr T apply(ScalarOp op, T l, T r) {
  switch (op) {
    case ScalarOp::add: return l + r;
    case ScalarOp::mul: return l * r;
    case ScalarOp::sub: return l - r;
    case ScalarOp::max: return l < r ? r : l;
    case ScalarOp::min: return r < l ? r : l;
  }
  return l;
}

/// Identity element of `op`; sub has none and throws invalid_argument.
template <Element T>
T identity_of(ScalarOp op) {
  switch (op) {
    case ScalarOp::add: return T{0};
    case ScalarOp::mul: return T{1};
    case ScalarOp::max:
      if constexpr (std::numeric_limits<T>::has_infinity)
        return -std::numeric_limits<T>::infinity();
      else
        return std::numeric_limits<T>::lowest();
    case ScalarOp::min:
      if constexpr (std::numeric_limits<T>::has_infinity)
        return std::numeric_limits<T>::infinity();
      else
        return std::numeric_limits<T>::max();
    case ScalarOp::sub: break;
  }
  throw Error(ErrorKind::invalid_argument, "operation has no identity element");
}

bool has_identity(ScalarOp op) noexcept;

/// psi(i, result) = f(psi(i, l), psi(i, r)) at every full index.
DenseArray pointwise(ScalarOp f, const DenseArray& l, const DenseArray& r);

/// f(s, x) for every component x of a.
DenseArray scalar_extend(ScalarOp f, const Scalar& s, const DenseArray& a);

/// Shape concat(shape(l), shape(r)); component at concat(i, j) is
/// f(psi(i, l), psi(j, r)). The result is row-major.
DenseArray outer(ScalarOp f, const DenseArray& l, const DenseArray& r);

/// Left fold of f over the leading dimension, starting from f's identity.
DenseArray reduce(ScalarOp f, const DenseArray& a);

/// Offsets of B read while computing one row of C. `i` and `k` identify the
/// (row, sigma) step the reads belong to.
struct ReadTrace {
  struct Step {
    extent_t i = 0;
    extent_t k = 0;
    std::vector<extent_t> b_offsets;
  };
  std::vector<Step> steps;
};

/// Generalized inner product of two row-major matrices: C[i,j] is the
/// `reduce_op` fold over k of combine(A[i,k], B[k,j]). Accumulation walks
/// rows: for each i and ascending k, the scalar A[i,k] is extended over the
/// contiguous row k of B and folded into row i of C.
DenseArray inner(ScalarOp reduce_op, ScalarOp combine, const DenseArray& a,
                 const DenseArray& b, ReadTrace* trace = nullptr);

/// Contiguous matrix product C = A B (inner with add/mul). Never reads a
/// column of B.
DenseArray gemm_moa(const DenseArray& a, const DenseArray& b,
                    ReadTrace* trace = nullptr);

/// Textbook i-j-k dot-product matrix product; the reference oracle.
DenseArray gemm_naive(const DenseArray& a, const DenseArray& b);

enum class ProductForm { hadamard, inner, kronecker };

/// The unified inner/outer/Hadamard product. `combine` is the scalar
/// product; `reduce_op` is used only by the inner form.
DenseArray ipophp(ProductForm form, ScalarOp combine, ScalarOp reduce_op,
                  const DenseArray& a, const DenseArray& b);

DenseArray hadamard(const DenseArray& a, const DenseArray& b);

/// Kronecker product of [m,n] and [p,q] matrices, shape [m*p, n*q].
DenseArray kron(const DenseArray& a, const DenseArray& b);

}  // namespace moa
