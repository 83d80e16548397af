#include "moa/lifting.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace moa::ir {

LiftSpec LiftSpec::split(std::string target, std::int64_t inner_extent,
                         std::string outer, std::string inner) {
  return {std::move(target), lit(inner_extent), std::move(outer), std::move(inner),
          std::nullopt, Form::outer_first};
}

namespace {

void require_fresh(const LoopNest& nest, const std::string& name) {
  if (name.empty()) throw Error(ErrorKind::invalid_argument, "empty loop name");
  if (nest.find_loop(name) != nullptr || nest.find_param(name) != nullptr)
    throw Error(ErrorKind::name_collision, "name '" + name + "' is already in use");
}

void require_loop_free(const LoopNest& nest, const Expr& e, const std::string& what) {
  for (const auto& s : e.symbols())
    if (nest.find_loop(s) != nullptr)
      throw Error(ErrorKind::invalid_argument,
                  what + " " + e.to_c() + " depends on loop variable '" + s + "'");
}

std::string divisibility_message(std::int64_t extent, std::int64_t part) {
  return "partition size " + std::to_string(part) + " does not divide extent " +
         std::to_string(extent);
}

}  // namespace

LoopNest lift(const LoopNest& nest, const LiftSpec& spec) {
  validate(nest);
  auto pos = nest.loop_position(spec.target_var);
  if (!pos)
    throw Error(ErrorKind::unknown_variable, "no loop named '" + spec.target_var + "'");
  require_fresh(nest, spec.outer_name);
  require_fresh(nest, spec.inner_name);
  if (spec.outer_name == spec.inner_name)
    throw Error(ErrorKind::name_collision, "outer and inner loops share the name '" +
                                               spec.outer_name + "'");

  const Loop& target = nest.loops[*pos];
  require_loop_free(nest, target.extent, "extent");
  require_loop_free(nest, spec.inner_extent, "partition size");
  const Expr outer_extent =
      spec.outer_extent ? *spec.outer_extent : (target.extent / spec.inner_extent).group();
  require_loop_free(nest, outer_extent, "partition count");

  const auto params = nest.bindings();
  const auto extent = target.extent.evaluate(params);
  const auto inner = spec.inner_extent.evaluate(params);
  if (inner <= 0)
    throw Error(ErrorKind::invalid_argument,
                "partition size must be positive, got " + std::to_string(inner));
  if (extent % inner != 0) throw Error(ErrorKind::non_divisible, divisibility_message(extent, inner));
  if (outer_extent.evaluate(params) * inner != extent)
    throw Error(ErrorKind::non_divisible, "partition count " + outer_extent.to_c() +
                                              " times partition size " +
                                              spec.inner_extent.to_c() +
                                              " does not equal extent " + target.extent.to_c());

  const auto outer_var = sym(spec.outer_name);
  const auto inner_var = sym(spec.inner_name);
  const Expr replacement =
      spec.form == LiftSpec::Form::outer_first
          ? ((outer_var * spec.inner_extent).group() + inner_var).group()
          : (inner_var + spec.inner_extent * outer_var).group();

  LoopNest out = nest;
  out.loops.erase(out.loops.begin() + static_cast<std::ptrdiff_t>(*pos));
  out.loops.insert(out.loops.begin() + static_cast<std::ptrdiff_t>(*pos),
                   {Loop{spec.outer_name, outer_extent, target.parallel},
                    Loop{spec.inner_name, spec.inner_extent, false}});
  out.body.out = nest.body.out.substitute(spec.target_var, replacement);
  out.body.left = nest.body.left.substitute(spec.target_var, replacement);
  out.body.right = nest.body.right.substitute(spec.target_var, replacement);
  validate(out);
  return out;
}

LoopNest interchange(const LoopNest& nest, std::span<const std::string> order) {
  validate(nest);
  if (order.size() != nest.loops.size())
    throw Error(ErrorKind::invalid_argument, "interchange order names " +
                                                 std::to_string(order.size()) + " loops, nest has " +
                                                 std::to_string(nest.loops.size()));
  LoopNest out = nest;
  out.loops.clear();
  for (const auto& var : order) {
    const Loop* loop = nest.find_loop(var);
    if (loop == nullptr) throw Error(ErrorKind::unknown_variable, "no loop named '" + var + "'");
    if (out.find_loop(var) != nullptr)
      throw Error(ErrorKind::invalid_argument, "loop '" + var + "' listed twice");
    out.loops.push_back(*loop);
  }
  // validate() rejects an extent that now refers to a loop placed inside it.
  validate(out);
  return out;
}

namespace {

void require_divides(std::int64_t extent, std::int64_t part, const char* what) {
  if (part <= 0)
    throw Error(ErrorKind::invalid_argument,
                std::string(what) + " must be positive, got " + std::to_string(part));
  if (extent % part != 0) throw Error(ErrorKind::non_divisible, divisibility_message(extent, part));
}

}  // namespace

LoopNest build_row_lifted(std::int64_t m, std::int64_t n, std::int64_t p, std::int64_t np) {
  require_divides(m, np, "partition count np");
  auto nest = build_gemm_nest(m, n, p);
  for (auto& param : nest.params)
    if (param.name == "np") param.value = np;
  LiftSpec spec;
  spec.target_var = "i";
  spec.inner_extent = (sym("sizel") / sym("np")).group();
  spec.outer_name = "k";
  spec.inner_name = "ip";
  spec.outer_extent = sym("np");
  spec.form = LiftSpec::Form::inner_first;
  return lift(nest, spec);
}

LoopNest build_col_lifted(std::int64_t m, std::int64_t n, std::int64_t p, std::int64_t rsize) {
  require_divides(p, rsize, "group size rsize");
  auto nest = with_param(build_gemm_nest(m, n, p), "rsize", rsize);
  LiftSpec spec;
  spec.target_var = "j";
  spec.inner_extent = sym("rsize");
  spec.outer_name = "jp";
  spec.inner_name = "kp";
  return lift(nest, spec);
}

LoopNest build_blocked(std::int64_t m, std::int64_t n, std::int64_t p, std::int64_t bi,
                       std::int64_t bk, std::int64_t bj) {
  require_divides(m, bi, "block rows bi");
  require_divides(n, bk, "block depth bk");
  require_divides(p, bj, "block columns bj");
  auto nest = build_gemm_nest(m, n, p);
  nest = with_param(std::move(nest), "bi", bi);
  nest = with_param(std::move(nest), "bk", bk);
  nest = with_param(std::move(nest), "bj", bj);
  auto split = [](std::string target, const char* size, std::string outer, std::string inner) {
    LiftSpec spec;
    spec.target_var = std::move(target);
    spec.inner_extent = sym(size);
    spec.outer_name = std::move(outer);
    spec.inner_name = std::move(inner);
    return spec;
  };
  nest = lift(nest, split("i", "bi", "ib", "ii"));
  nest = lift(nest, split("sigma", "bk", "sb", "si"));
  nest = lift(nest, split("j", "bj", "jb", "ji"));
  const std::string order[] = {"ib", "sb", "jb", "ii", "si", "ji"};
  return interchange(nest, order);
}

bool writes_disjoint_across(const LoopNest& nest, std::string_view var,
                            const Bindings& overrides) {
  auto pos = nest.loop_position(var);
  if (!pos) throw Error(ErrorKind::unknown_variable, "no loop named '" + std::string(var) + "'");
  std::map<std::int64_t, std::int64_t> writer;
  for (const auto& rec : trace_nest(nest, overrides)) {
    const auto v = rec.loop_values[*pos];
    auto [it, inserted] = writer.emplace(rec.out, v);
    if (!inserted && it->second != v) return false;
  }
  return true;
}

}  // namespace moa::ir
