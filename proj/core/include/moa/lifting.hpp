#pragma once

// Dimension lifting: split one loop of a nest into an (outer, inner) pair,
// the outer loop indexing partitions and the inner one positions within a
// partition. Builders for the row-lifted, column-lifted and blocked matrix
// product nests are compositions of lift and interchange.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "moa/loop_nest.hpp"

namespace moa::ir {

struct LiftSpec {
  /// How the substituted index is written; both forms have the same value
  /// outer * inner_extent + inner.
  enum class Form {
    outer_first,  // ((outer*inner_extent)+inner)
    inner_first,  // (inner+inner_extent*outer)
  };

  std::string target_var;
  Expr inner_extent;
  std::string outer_name;
  std::string inner_name;
  /// Extent of the new outer loop. Defaults to (target_extent/inner_extent).
  std::optional<Expr> outer_extent;
  Form form = Form::outer_first;

  /// Split `target` into partitions of a literal size.
  static LiftSpec split(std::string target, std::int64_t inner_extent,
                        std::string outer, std::string inner);
};

/// Replaces the target loop by the outer loop immediately enclosing the
/// inner loop and substitutes every use of the target variable. The target
/// extent must not depend on other loop variables, and the inner extent must
/// divide it exactly under the nest's parameter values.
LoopNest lift(const LoopNest& nest, const LiftSpec& spec);

/// Reorders the loops to `order`, which must be a permutation of the nest's
/// loop variables in which every extent only refers to loops placed outside
/// it.
LoopNest interchange(const LoopNest& nest, std::span<const std::string> order);

/// ip_rows.c: the i loop lifted into k over np partitions of sizel/np rows.
/// The k loop is the parallel loop.
LoopNest build_row_lifted(std::int64_t m, std::int64_t n, std::int64_t p,
                          std::int64_t np);

/// ip_cols.c: the j loop lifted into jp over groups of rsize columns.
LoopNest build_col_lifted(std::int64_t m, std::int64_t n, std::int64_t p,
                          std::int64_t rsize);

/// All three loops lifted (i by bi, sigma by bk, j by bj) and interchanged
/// to (ib, sb, jb, ii, si, ji). Block partial products are summed into C in
/// row-major block order, sigma blocks ascending.
LoopNest build_blocked(std::int64_t m, std::int64_t n, std::int64_t p,
                       std::int64_t bi, std::int64_t bk, std::int64_t bj);

/// True when iterations of loop `var` that differ in its value never write
/// the same C offset. This is the condition for running that loop in
/// parallel.
bool writes_disjoint_across(const LoopNest& nest, std::string_view var,
                            const Bindings& overrides = {});

}  // namespace moa::ir
