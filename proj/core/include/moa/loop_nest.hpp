#pragma once

// Loop-nest IR for the operational normal form of the matrix product: a
// perfect nest of counted loops around one fused multiply-accumulate,
//   C[out] = C[out] + A[left] * B[right]
// plus a checked interpreter and a C99 renderer.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moa/error.hpp"

namespace moa::ir {

using Bindings = std::map<std::string, std::int64_t, std::less<>>;

/// Integer index expression over loop variables and named parameters.
///
/// Expressions are immutable trees. A node may be marked grouped, in which
/// case the renderer wraps it in parentheses even where precedence does not
/// require it; grouping has no effect on the value.
class Expr {
 public:
  enum class Kind { constant, symbol, add, mul, div };

  Expr() : Expr(constant(0)) {}
  static Expr constant(std::int64_t value);
  static Expr symbol(std::string name);

  Kind kind() const noexcept;
  std::int64_t value() const;
  const std::string& name() const;
  Expr lhs() const;
  Expr rhs() const;
  bool grouped() const noexcept;

  /// Same expression, rendered inside parentheses.
  Expr group() const;

  /// Value under `env`; throws unbound_parameter for a missing symbol.
  /// Division truncates toward zero, as in C.
  std::int64_t evaluate(const Bindings& env) const;

  Expr substitute(std::string_view name, const Expr& replacement) const;
  void collect_symbols(std::set<std::string, std::less<>>& out) const;
  std::set<std::string, std::less<>> symbols() const;

  /// C source text, without whitespace.
  std::string to_c() const;

  friend Expr operator+(const Expr& l, const Expr& r);
  friend Expr operator*(const Expr& l, const Expr& r);
  friend Expr operator/(const Expr& l, const Expr& r);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr binary(Kind kind, const Expr& l, const Expr& r);
  std::shared_ptr<const Node> node_;
};

inline Expr sym(std::string name) { return Expr::symbol(std::move(name)); }
inline Expr lit(std::int64_t v) { return Expr::constant(v); }

/// Normalized affine form: sum of coefficient * variable plus a constant.
/// Coefficients are integers once parameters are bound.
struct AffineExpr {
  std::vector<std::pair<std::int64_t, std::string>> terms;
  std::int64_t constant = 0;

  std::int64_t coefficient(std::string_view var) const;
  std::int64_t evaluate(const Bindings& vars) const;
};

/// Binds the symbols in `params` and collects every remaining symbol as an
/// affine variable. Throws invalid_argument for a product of two variable
/// terms or a division involving a variable.
AffineExpr to_affine(const Expr& e, const Bindings& params);

/// Counted loop: `var` runs over [0, extent) with step 1.
struct Loop {
  std::string var;
  Expr extent;
  /// Iterations write disjoint parts of C; eligible for a parallel pragma.
  bool parallel = false;
};

/// C[out] = C[out] + A[left] * B[right]
struct AccumStmt {
  Expr out;
  Expr left;
  Expr right;
};

struct Param {
  std::string name;
  std::optional<std::int64_t> value;
};

struct LoopNest {
  std::vector<Loop> loops;  // outer to inner
  AccumStmt body;
  std::vector<Param> params;  // in signature order

  const Loop* find_loop(std::string_view var) const;
  std::optional<std::size_t> loop_position(std::string_view var) const;
  const Param* find_param(std::string_view name) const;

  /// Parameter values with `overrides` taking precedence. Parameters
  /// without a value or override are left out.
  Bindings bindings(const Bindings& overrides = {}) const;
};

/// Throws name_collision for repeated loop or parameter names and
/// unknown_variable for a symbol that no enclosing loop or parameter binds.
void validate(const LoopNest& nest);

/// Product of loop extents under the nest's parameter values.
std::int64_t iteration_count(const LoopNest& nest, const Bindings& overrides = {});

/// Adds a named parameter at the end of the signature.
LoopNest with_param(LoopNest nest, std::string name, std::int64_t value);

/// The (i, sigma, j) nest of ip.c with parameters sizel=m, sizer=p,
/// sizeres=m*p, np=1 and shr0=n.
LoopNest build_gemm_nest(std::int64_t m, std::int64_t n, std::int64_t p);

/// Runs the nest sequentially, applying the accumulate statement at every
/// innermost iteration. Every offset is bounds-checked.
template <typename T>
void eval_nest(const LoopNest& nest, std::span<const T> a, std::span<const T> b,
               std::span<T> c, const Bindings& overrides = {});

/// A nest with its parameters bound and every index expression reduced to
/// an affine form over loop positions. Evaluating a compiled nest again
/// skips validation and normalization.
class CompiledNest {
 public:
  /// value = constant + sum coef[d] * (value of loop d)
  struct Form {
    std::vector<std::int64_t> coef;
    std::int64_t constant = 0;

    std::int64_t at(std::span<const std::int64_t> loop_values) const;
  };

  explicit CompiledNest(const LoopNest& nest, const Bindings& overrides = {});

  /// Same semantics and checks as eval_nest.
  template <typename T>
  void eval(std::span<const T> a, std::span<const T> b, std::span<T> c) const;

  const std::vector<Form>& extents() const noexcept { return extents_; }
  const Form& out() const noexcept { return out_; }
  const Form& left() const noexcept { return left_; }
  const Form& right() const noexcept { return right_; }

 private:
  std::vector<Form> extents_;
  Form out_, left_, right_;
};

struct AccessRecord {
  std::vector<std::int64_t> loop_values;  // in loop order
  std::int64_t out = 0;
  std::int64_t left = 0;
  std::int64_t right = 0;
};

/// Every access the nest performs, in execution order.
std::vector<AccessRecord> trace_nest(const LoopNest& nest,
                                     const Bindings& overrides = {});

struct RenderOptions {
  std::string function_name = "ip";
  /// (loop variable, pragma text) pairs; the text is emitted verbatim on
  /// its own line before the named loop.
  std::vector<std::pair<std::string, std::string>> pragmas;
};

/// C99 source for the nest, 2-space indent, LF line endings.
std::string render_c(const LoopNest& nest, const RenderOptions& options);

}  // namespace moa::ir
