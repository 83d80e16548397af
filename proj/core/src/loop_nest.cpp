#include "moa/loop_nest.hpp"

#include <algorithm>
#include <sstream>

namespace moa::ir {

struct Expr::Node {
  Kind kind = Kind::constant;
  std::int64_t value = 0;
  std::string name;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
  bool grouped = false;
};

Expr Expr::constant(std::int64_t value) {
  return Expr(std::make_shared<const Node>(Node{Kind::constant, value, {}, nullptr, nullptr, false}));
}

Expr Expr::symbol(std::string name) {
  if (name.empty()) throw Error(ErrorKind::invalid_argument, "empty symbol name");
  return Expr(std::make_shared<const Node>(
      Node{Kind::symbol, 0, std::move(name), nullptr, nullptr, false}));
}

Expr Expr::binary(Kind kind, const Expr& l, const Expr& r) {
  return Expr(std::make_shared<const Node>(Node{kind, 0, {}, l.node_, r.node_, false}));
}

Expr operator+(const Expr& l, const Expr& r) { return Expr::binary(Expr::Kind::add, l, r); }
Expr operator*(const Expr& l, const Expr& r) { return Expr::binary(Expr::Kind::mul, l, r); }
Expr operator/(const Expr& l, const Expr& r) { return Expr::binary(Expr::Kind::div, l, r); }

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
std::int64_t Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Expr Expr::lhs() const { return Expr(node_->lhs); }
Expr Expr::rhs() const { return Expr(node_->rhs); }
bool Expr::grouped() const noexcept { return node_->grouped; }

Expr Expr::group() const {
  auto n = *node_;
  n.grouped = true;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

std::int64_t Expr::evaluate(const Bindings& env) const {
  switch (kind()) {
    case Kind::constant: return value();
    case Kind::symbol: {
      auto it = env.find(name());
      if (it == env.end())
        throw Error(ErrorKind::unbound_parameter, "symbol '" + name() + "' is unbound");
      return it->second;
    }
    case Kind::add: return lhs().evaluate(env) + rhs().evaluate(env);
    case Kind::mul: return lhs().evaluate(env) * rhs().evaluate(env);
    case Kind::div: {
      const auto d = rhs().evaluate(env);
      if (d == 0) throw Error(ErrorKind::invalid_argument, "division by zero in " + to_c());
      return lhs().evaluate(env) / d;
    }
  }
  return 0;
}

Expr Expr::substitute(std::string_view target, const Expr& replacement) const {
  switch (kind()) {
    case Kind::constant: return *this;
    case Kind::symbol: return name() == target ? replacement : *this;
    default: break;
  }
  auto n = *node_;
  n.lhs = lhs().substitute(target, replacement).node_;
  n.rhs = rhs().substitute(target, replacement).node_;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

void Expr::collect_symbols(std::set<std::string, std::less<>>& out) const {
  switch (kind()) {
    case Kind::constant: return;
    case Kind::symbol: out.insert(name()); return;
    default:
      lhs().collect_symbols(out);
      rhs().collect_symbols(out);
  }
}

std::set<std::string, std::less<>> Expr::symbols() const {
  std::set<std::string, std::less<>> out;
  collect_symbols(out);
  return out;
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::add: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    default: return 3;
  }
}

void print(const Expr& e, std::string& out);

// Operand of a binary node; parenthesized when its own grouping or the
// required binding strength says so.
void print_operand(const Expr& e, int min_precedence, std::string& out) {
  if (!e.grouped() && precedence(e) < min_precedence) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  if (e.grouped()) out += '(';
  switch (e.kind()) {
    case Expr::Kind::constant:
      if (e.value() < 0)
        out += "(" + std::to_string(e.value()) + ")";
      else
        out += std::to_string(e.value());
      break;
    case Expr::Kind::symbol: out += e.name(); break;
    case Expr::Kind::add:
      print_operand(e.lhs(), 1, out);
      out += '+';
      print_operand(e.rhs(), 1, out);
      break;
    case Expr::Kind::mul:
      print_operand(e.lhs(), 2, out);
      out += '*';
      // a*(b/c) differs from a*b/c under truncating division.
      print_operand(e.rhs(), e.rhs().kind() == Expr::Kind::div ? 3 : 2, out);
      break;
    case Expr::Kind::div:
      print_operand(e.lhs(), 2, out);
      out += '/';
      print_operand(e.rhs(), 3, out);
      break;
  }
  if (e.grouped()) out += ')';
}

}  // namespace

std::string Expr::to_c() const {
  std::string out;
  print(*this, out);
  return out;
}

std::int64_t AffineExpr::coefficient(std::string_view var) const {
  std::int64_t c = 0;
  for (const auto& [coef, name] : terms)
    if (name == var) c += coef;
  return c;
}

std::int64_t AffineExpr::evaluate(const Bindings& vars) const {
  std::int64_t v = constant;
  for (const auto& [coef, name] : terms) {
    auto it = vars.find(name);
    if (it == vars.end())
      throw Error(ErrorKind::unbound_parameter, "variable '" + name + "' is unbound");
    v += coef * it->second;
  }
  return v;
}

namespace {

// Sparse affine form keyed by variable name.
struct Linear {
  std::map<std::string, std::int64_t, std::less<>> coef;
  std::int64_t constant = 0;
  bool is_constant() const { return coef.empty(); }
};

Linear scaled(Linear l, std::int64_t k) {
  for (auto it = l.coef.begin(); it != l.coef.end();) {
    it->second *= k;
    it = it->second == 0 ? l.coef.erase(it) : std::next(it);
  }
  l.constant *= k;
  return l;
}

Linear linearize(const Expr& e, const Bindings& params) {
  switch (e.kind()) {
    case Expr::Kind::constant: return {{}, e.value()};
    case Expr::Kind::symbol: {
      if (auto it = params.find(e.name()); it != params.end()) return {{}, it->second};
      Linear l;
      l.coef[e.name()] = 1;
      return l;
    }
    case Expr::Kind::add: {
      auto l = linearize(e.lhs(), params);
      auto r = linearize(e.rhs(), params);
      for (const auto& [name, c] : r.coef) {
        l.coef[name] += c;
        if (l.coef[name] == 0) l.coef.erase(name);
      }
      l.constant += r.constant;
      return l;
    }
    case Expr::Kind::mul: {
      auto l = linearize(e.lhs(), params);
      auto r = linearize(e.rhs(), params);
      if (l.is_constant()) return scaled(std::move(r), l.constant);
      if (r.is_constant()) return scaled(std::move(l), r.constant);
      throw Error(ErrorKind::invalid_argument, "non-affine product " + e.to_c());
    }
    case Expr::Kind::div: {
      auto l = linearize(e.lhs(), params);
      auto r = linearize(e.rhs(), params);
      if (!l.is_constant() || !r.is_constant())
        throw Error(ErrorKind::invalid_argument, "non-affine division " + e.to_c());
      if (r.constant == 0)
        throw Error(ErrorKind::invalid_argument, "division by zero in " + e.to_c());
      return {{}, l.constant / r.constant};
    }
  }
  return {};
}

}  // namespace

AffineExpr to_affine(const Expr& e, const Bindings& params) {
  auto l = linearize(e, params);
  AffineExpr out;
  out.constant = l.constant;
  for (const auto& [name, c] : l.coef) out.terms.emplace_back(c, name);
  return out;
}

const Loop* LoopNest::find_loop(std::string_view var) const {
  auto it = std::find_if(loops.begin(), loops.end(),
                         [&](const Loop& l) { return l.var == var; });
  return it == loops.end() ? nullptr : &*it;
}

std::optional<std::size_t> LoopNest::loop_position(std::string_view var) const {
  for (std::size_t d = 0; d < loops.size(); ++d)
    if (loops[d].var == var) return d;
  return std::nullopt;
}

const Param* LoopNest::find_param(std::string_view name) const {
  auto it = std::find_if(params.begin(), params.end(),
                         [&](const Param& p) { return p.name == name; });
  return it == params.end() ? nullptr : &*it;
}

Bindings LoopNest::bindings(const Bindings& overrides) const {
  Bindings out;
  for (const auto& p : params)
    if (p.value) out[p.name] = *p.value;
  for (const auto& [name, v] : overrides) out[name] = v;
  return out;
}

void validate(const LoopNest& nest) {
  std::set<std::string, std::less<>> names;
  for (const auto& p : nest.params)
    if (!names.insert(p.name).second)
      throw Error(ErrorKind::name_collision, "parameter '" + p.name + "' declared twice");
  std::set<std::string, std::less<>> in_scope = names;
  for (const auto& loop : nest.loops) {
    for (const auto& s : loop.extent.symbols())
      if (!in_scope.contains(s))
        throw Error(ErrorKind::unknown_variable,
                    "extent of loop '" + loop.var + "' uses unbound symbol '" + s + "'");
    if (!in_scope.insert(loop.var).second)
      throw Error(ErrorKind::name_collision, "loop variable '" + loop.var +
                                                 "' collides with an earlier name");
  }
  for (const Expr* e : {&nest.body.out, &nest.body.left, &nest.body.right})
    for (const auto& s : e->symbols())
      if (!in_scope.contains(s))
        throw Error(ErrorKind::unknown_variable,
                    "offset " + e->to_c() + " uses unbound symbol '" + s + "'");
}

LoopNest with_param(LoopNest nest, std::string name, std::int64_t value) {
  if (nest.find_param(name) != nullptr || nest.find_loop(name) != nullptr)
    throw Error(ErrorKind::name_collision, "name '" + name + "' already in use");
  nest.params.push_back({std::move(name), value});
  return nest;
}

LoopNest build_gemm_nest(std::int64_t m, std::int64_t n, std::int64_t p) {
  if (m < 0 || n < 0 || p < 0)
    throw Error(ErrorKind::negative_extent, "GEMM extents must be non-negative");
  const auto i = sym("i"), j = sym("j"), sigma = sym("sigma");
  const auto sizel = sym("sizel"), sizer = sym("sizer"), shr0 = sym("shr0");
  LoopNest nest;
  nest.params = {{"sizel", m}, {"sizer", p}, {"sizeres", m * p}, {"np", 1}, {"shr0", n}};
  nest.loops = {{"i", sizel, true}, {"sigma", shr0, false}, {"j", sizer, false}};
  nest.body.out = j + i * sizer;
  nest.body.left = (i * shr0).group() + sigma;
  nest.body.right = (sigma * sizer).group() + j;
  return nest;
}

namespace {

using Form = CompiledNest::Form;

Form densify(const LoopNest& nest, const Expr& e, const Bindings& params) {
  Form d;
  d.coef.assign(nest.loops.size(), 0);
  auto aff = to_affine(e, params);
  d.constant = aff.constant;
  for (const auto& [c, name] : aff.terms) {
    auto pos = nest.loop_position(name);
    if (!pos) {
      if (nest.find_param(name) != nullptr)
        throw Error(ErrorKind::unbound_parameter, "parameter '" + name + "' has no value");
      throw Error(ErrorKind::unknown_variable, "symbol '" + name + "' is not bound");
    }
    d.coef[*pos] += c;
  }
  return d;
}

std::int64_t checked_extent(const Form& f, std::span<const std::int64_t> v) {
  const std::int64_t limit = f.at(v);
  if (limit < 0)
    throw Error(ErrorKind::negative_extent, "loop extent evaluated to " + std::to_string(limit));
  return limit;
}

template <typename F>
void walk(const CompiledNest& c, F&& body) {
  const std::size_t depth = c.extents().size();
  std::vector<std::int64_t> v(depth, 0);
  auto level = [&](auto& self, std::size_t d) -> void {
    if (d == depth) {
      body(v);
      return;
    }
    const std::int64_t limit = checked_extent(c.extents()[d], v);
    for (std::int64_t x = 0; x < limit; ++x) {
      v[d] = x;
      self(self, d + 1);
    }
    v[d] = 0;
  };
  level(level, 0);
}

[[noreturn]] void out_of_bounds(const char* buffer, std::int64_t offset, std::size_t size) {
  throw Error(ErrorKind::out_of_bounds, std::string("offset ") + std::to_string(offset) +
                                            " outside buffer " + buffer + " of size " +
                                            std::to_string(size));
}

}  // namespace

std::int64_t CompiledNest::Form::at(std::span<const std::int64_t> loop_values) const {
  std::int64_t r = constant;
  for (std::size_t d = 0; d < coef.size(); ++d) r += coef[d] * loop_values[d];
  return r;
}

CompiledNest::CompiledNest(const LoopNest& nest, const Bindings& overrides) {
  validate(nest);
  const auto params = nest.bindings(overrides);
  for (const auto& loop : nest.loops) extents_.push_back(densify(nest, loop.extent, params));
  out_ = densify(nest, nest.body.out, params);
  left_ = densify(nest, nest.body.left, params);
  right_ = densify(nest, nest.body.right, params);
}

// Offsets are carried down the recursion and stepped by each loop's
// coefficient, so the innermost body does no affine evaluation.
template <typename T>
void CompiledNest::eval(std::span<const T> a, std::span<const T> b, std::span<T> c) const {
  const std::size_t depth = extents_.size();
  const auto as = static_cast<std::int64_t>(a.size());
  const auto bs = static_cast<std::int64_t>(b.size());
  const auto cs = static_cast<std::int64_t>(c.size());
  std::vector<std::int64_t> v(depth, 0);
  auto level = [&](auto& self, std::size_t d, std::int64_t o, std::int64_t l,
                   std::int64_t r) -> void {
    if (d == depth) {
      if (o < 0 || o >= cs) out_of_bounds("C", o, c.size());
      if (l < 0 || l >= as) out_of_bounds("A", l, a.size());
      if (r < 0 || r >= bs) out_of_bounds("B", r, b.size());
      c[static_cast<std::size_t>(o)] = c[static_cast<std::size_t>(o)] +
                                       a[static_cast<std::size_t>(l)] * b[static_cast<std::size_t>(r)];
      return;
    }
    const std::int64_t limit = checked_extent(extents_[d], v);
    const auto co = out_.coef[d], cl = left_.coef[d], cr = right_.coef[d];
    for (std::int64_t x = 0; x < limit; ++x, o += co, l += cl, r += cr) {
      v[d] = x;
      self(self, d + 1, o, l, r);
    }
    v[d] = 0;
  };
  level(level, 0, out_.constant, left_.constant, right_.constant);
}

template void CompiledNest::eval<double>(std::span<const double>, std::span<const double>,
                                         std::span<double>) const;
template void CompiledNest::eval<std::int64_t>(std::span<const std::int64_t>,
                                               std::span<const std::int64_t>,
                                               std::span<std::int64_t>) const;

std::int64_t iteration_count(const LoopNest& nest, const Bindings& overrides) {
  const CompiledNest compiled(nest, overrides);
  std::int64_t count = 0;
  walk(compiled, [&](const auto&) { ++count; });
  return count;
}

template <typename T>
void eval_nest(const LoopNest& nest, std::span<const T> a, std::span<const T> b,
               std::span<T> c, const Bindings& overrides) {
  CompiledNest(nest, overrides).eval<T>(a, b, c);
}

template void eval_nest<double>(const LoopNest&, std::span<const double>,
                                std::span<const double>, std::span<double>,
                                const Bindings&);
template void eval_nest<std::int64_t>(const LoopNest&, std::span<const std::int64_t>,
                                      std::span<const std::int64_t>,
                                      std::span<std::int64_t>, const Bindings&);

std::vector<AccessRecord> trace_nest(const LoopNest& nest, const Bindings& overrides) {
  const CompiledNest compiled(nest, overrides);
  std::vector<AccessRecord> out;
  walk(compiled, [&](const std::vector<std::int64_t>& v) {
    out.push_back({v, compiled.out().at(v), compiled.left().at(v), compiled.right().at(v)});
  });
  return out;
}

std::string render_c(const LoopNest& nest, const RenderOptions& options) {
  validate(nest);
  std::set<std::string, std::less<>> reserved{"C", "A", "B", options.function_name};
  if (options.function_name.empty())
    throw Error(ErrorKind::invalid_argument, "empty function name");
  for (const auto& p : nest.params)
    if (reserved.contains(p.name))
      throw Error(ErrorKind::name_collision, "parameter '" + p.name + "' shadows a reserved name");
  for (const auto& l : nest.loops)
    if (reserved.contains(l.var))
      throw Error(ErrorKind::name_collision, "loop variable '" + l.var + "' shadows a reserved name");
  for (const auto& [var, text] : options.pragmas)
    if (nest.find_loop(var) == nullptr)
      throw Error(ErrorKind::unknown_variable, "pragma names unknown loop '" + var + "'");

  std::ostringstream os;
  os << "void " << options.function_name << "(double *C, double *A, double *B";
  if (!nest.params.empty()) {
    os << ",\n  ";
    for (std::size_t k = 0; k < nest.params.size(); ++k)
      os << (k ? ", " : "") << "int " << nest.params[k].name;
  }
  os << ")\n{\n";
  if (!nest.loops.empty()) {
    os << "  int ";
    for (std::size_t d = 0; d < nest.loops.size(); ++d)
      os << (d ? ", " : "") << nest.loops[d].var;
    os << ";\n";
  }
  std::string indent = "  ";
  for (const auto& loop : nest.loops) {
    for (const auto& [var, text] : options.pragmas)
      if (var == loop.var) os << indent << text << '\n';
    os << indent << "for (" << loop.var << " = 0; " << loop.var << " < "
       << loop.extent.to_c() << "; " << loop.var << "++) {\n";
    indent += "  ";
  }
  const auto out = nest.body.out.to_c();
  os << indent << "C[" << out << "] = C[" << out << "] + A[" << nest.body.left.to_c()
     << "]*B[" << nest.body.right.to_c() << "];\n";
  for (std::size_t d = nest.loops.size(); d-- > 0;) {
    indent.resize(indent.size() - 2);
    os << indent << "}\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace moa::ir
