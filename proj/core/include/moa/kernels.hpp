#pragma once

// Flat-buffer GEMM kernels over row-major spans. Every kernel accumulates,
// C += A B, like the derived loop nests; callers zero C for a plain product.
// Each C component is accumulated with k ascending in every kernel, so from
// a zeroed C all of them produce bitwise identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "moa/error.hpp"

namespace moa::kernels {

struct GemmDims {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t p = 0;
};

/// Block extents along i (rows of A and C), sigma (the shared extent) and
/// j (columns of B and C).
struct BlockDims {
  std::int64_t bi = 1;
  std::int64_t bk = 1;
  std::int64_t bj = 1;
};

inline void check_buffers(std::size_t a, std::size_t b, std::size_t c,
                          GemmDims d) {
  if (d.m < 0 || d.n < 0 || d.p < 0)
    throw Error(ErrorKind::negative_extent, "negative GEMM extent");
  if (a < static_cast<std::size_t>(d.m * d.n) ||
      b < static_cast<std::size_t>(d.n * d.p) ||
      c < static_cast<std::size_t>(d.m * d.p))
    throw Error(ErrorKind::out_of_bounds, "GEMM buffer smaller than its shape");
}

inline void check_blocks(GemmDims d, BlockDims b) {
  if (b.bi <= 0 || b.bk <= 0 || b.bj <= 0)
    throw Error(ErrorKind::invalid_argument, "block extents must be positive");
  if (d.m % b.bi != 0 || d.n % b.bk != 0 || d.p % b.bj != 0)
    throw Error(ErrorKind::non_divisible,
                "block " + std::to_string(b.bi) + "x" + std::to_string(b.bk) +
                    "x" + std::to_string(b.bj) + " does not divide " +
                    std::to_string(d.m) + "x" + std::to_string(d.n) + "x" +
                    std::to_string(d.p));
}

/// Row of A times column of B; the strided baseline.
template <typename T>
void naive(std::span<const T> a, std::span<const T> b, std::span<T> c,
           GemmDims d) {
  check_buffers(a.size(), b.size(), c.size(), d);
  const auto [m, n, p] = d;
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < p; ++j) {
      T acc{0};
      for (std::int64_t k = 0; k < n; ++k) acc += a[i * n + k] * b[k * p + j];
      c[i * p + j] += acc;
    }
}

/// Loop order (i, sigma, j): A[i,sigma] scales the contiguous row sigma of
/// B into the contiguous row i of C.
template <typename T>
void contiguous(std::span<const T> a, std::span<const T> b, std::span<T> c,
                GemmDims d) {
  check_buffers(a.size(), b.size(), c.size(), d);
  const auto [m, n, p] = d;
  for (std::int64_t i = 0; i < m; ++i) {
    T* crow = c.data() + i * p;
    for (std::int64_t k = 0; k < n; ++k) {
      const T s = a[i * n + k];
      const T* brow = b.data() + k * p;
      for (std::int64_t j = 0; j < p; ++j) crow[j] += s * brow[j];
    }
  }
}

/// Six-deep blocked nest: block loops (ib, kb, jb) enclose intra-block loops
/// (ii, ki, ji). For a fixed C component the k order is kb ascending then
/// ki ascending, i.e. plain k ascending.
template <typename T>
void blocked(std::span<const T> a, std::span<const T> b, std::span<T> c,
             GemmDims d, BlockDims blk) {
  check_buffers(a.size(), b.size(), c.size(), d);
  check_blocks(d, blk);
  const auto [m, n, p] = d;
  const auto [bi, bk, bj] = blk;
  for (std::int64_t ib = 0; ib < m / bi; ++ib)
    for (std::int64_t kb = 0; kb < n / bk; ++kb)
      for (std::int64_t jb = 0; jb < p / bj; ++jb)
        for (std::int64_t ii = 0; ii < bi; ++ii) {
          const std::int64_t i = ib * bi + ii;
          T* crow = c.data() + i * p + jb * bj;
          for (std::int64_t ki = 0; ki < bk; ++ki) {
            const std::int64_t k = kb * bk + ki;
            const T s = a[i * n + k];
            const T* brow = b.data() + k * p + jb * bj;
            for (std::int64_t ji = 0; ji < bj; ++ji) crow[ji] += s * brow[ji];
          }
        }
}

/// Row-lifted product: the i loop is split into `parts` partitions of
/// m/parts rows, and each partition runs the contiguous kernel on its own
/// thread. Partitions write disjoint rows of C.
template <typename T>
void rows_parallel(std::span<const T> a, std::span<const T> b, std::span<T> c,
                   GemmDims d, std::int64_t parts) {
  check_buffers(a.size(), b.size(), c.size(), d);
  if (parts <= 0)
    throw Error(ErrorKind::invalid_argument, "partition count must be positive");
  if (d.m % parts != 0)
    throw Error(ErrorKind::non_divisible,
                std::to_string(parts) + " partitions do not divide " +
                    std::to_string(d.m) + " rows");
  const std::int64_t rows = d.m / parts;
  const GemmDims part{rows, d.n, d.p};
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(parts));
  for (std::int64_t k = 0; k < parts; ++k) {
    auto a_part = a.subspan(static_cast<std::size_t>(k * rows * d.n),
                            static_cast<std::size_t>(rows * d.n));
    auto c_part = c.subspan(static_cast<std::size_t>(k * rows * d.p),
                            static_cast<std::size_t>(rows * d.p));
    workers.emplace_back([=] { contiguous<T>(a_part, b, c_part, part); });
  }
}

}  // namespace moa::kernels
