#include "clin/expr.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "clin/error.hpp"

namespace clin {

namespace {

constexpr std::string_view kImaginaryName = "%i";

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& q) {
  std::size_t h = std::hash<long>{}(mpz_get_si(q.get_num_mpz_t()));
  h = mix(h, std::hash<long>{}(mpz_get_si(q.get_den_mpz_t())));
  h = mix(h, mpz_size(q.get_num_mpz_t()));
  return mix(h, static_cast<std::size_t>(mpz_sgn(q.get_num_mpz_t()) + 1));
}

void finalize_hash(detail::Node& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ULL;
  switch (n.kind) {
    case NodeKind::Constant:
      h = mix(h, hash_rational(n.value));
      break;
    case NodeKind::Symbol:
      h = mix(h, std::hash<std::string>{}(n.name));
      break;
    case NodeKind::Apply:
      h = mix(h, static_cast<std::size_t>(n.fn));
      [[fallthrough]];
    default:
      for (const auto& op : n.operands) h = mix(h, op.hash());
  }
  n.hash = h;
}

const Expr& zero_expr() {
  static const Expr z{Rational(0)};
  return z;
}

const Expr& one_expr() {
  static const Expr o{Rational(1)};
  return o;
}

}  // namespace

Expr make_node(detail::Node node) {
  finalize_hash(node);
  return Expr(std::make_shared<const detail::Node>(std::move(node)));
}

std::string_view function_name(Function fn) {
  switch (fn) {
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Arctan: return "arctan";
    case Function::Arctan2: return "arctan2";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  static constexpr Function all[] = {Function::Exp,    Function::Ln,      Function::Sin, Function::Cos,
                                     Function::Arctan, Function::Arctan2, Function::Sqrt};
  for (auto fn : all)
    if (function_name(fn) == name) return fn;
  if (name == "log") return Function::Ln;
  return std::nullopt;
}

int function_arity(Function fn) { return fn == Function::Arctan2 ? 2 : 1; }

// ---------------------------------------------------------------------------
// Node access

Expr::Expr() : Expr(zero_expr()) {}

Expr::Expr(int value) : Expr(Rational(value)) {}

Expr::Expr(long value) : Expr(Rational(value)) {}

Expr::Expr(const Rational& value) {
  detail::Node n;
  n.kind = NodeKind::Constant;
  n.value = value;
  n.value.canonicalize();
  *this = make_node(std::move(n));
}

Expr Expr::symbol(std::string name) {
  detail::Node n;
  n.kind = NodeKind::Symbol;
  n.name = std::move(name);
  return make_node(std::move(n));
}

Expr Expr::imaginary_unit() {
  static const Expr unit = symbol(std::string(kImaginaryName));
  return unit;
}

Expr Expr::raw_sum(std::vector<Expr> terms) {
  detail::Node n;
  n.kind = NodeKind::Sum;
  n.operands = std::move(terms);
  return make_node(std::move(n));
}

Expr Expr::raw_product(std::vector<Expr> factors) {
  detail::Node n;
  n.kind = NodeKind::Product;
  n.operands = std::move(factors);
  return make_node(std::move(n));
}

Expr Expr::raw_power(Expr base, Expr exponent) {
  detail::Node n;
  n.kind = NodeKind::Power;
  n.operands = {std::move(base), std::move(exponent)};
  return make_node(std::move(n));
}

Expr Expr::raw_apply(Function fn, std::vector<Expr> args) {
  if (static_cast<int>(args.size()) != function_arity(fn))
    throw Error(ErrorCode::InvalidArgument,
                std::string(function_name(fn)) + " expects " + std::to_string(function_arity(fn)) + " argument(s)");
  detail::Node n;
  n.kind = NodeKind::Apply;
  n.fn = fn;
  n.operands = std::move(args);
  return make_node(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return is_constant() && sgn(node_->value) == 0; }
bool Expr::is_one() const { return is_constant() && node_->value == 1; }
bool Expr::is_integer() const { return is_constant() && node_->value.get_den() == 1; }
bool Expr::is_imaginary_unit() const { return is_symbol() && node_->name == kImaginaryName; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Function Expr::function() const { return node_->fn; }
std::span<const Expr> Expr::operands() const { return node_->operands; }
std::size_t Expr::hash() const { return node_->hash; }

// ---------------------------------------------------------------------------
// Ordering

int compare(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case NodeKind::Constant: {
      int c = cmp(a.value(), b.value());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case NodeKind::Symbol: {
      int c = a.name().compare(b.name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case NodeKind::Apply:
      if (a.function() != b.function()) return a.function() < b.function() ? -1 : 1;
      [[fallthrough]];
    default: {
      auto ao = a.operands();
      auto bo = b.operands();
      std::size_t n = std::min(ao.size(), bo.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(ao[i], bo[i]);
        if (c != 0) return c;
      }
      if (ao.size() != bo.size()) return ao.size() < bo.size() ? -1 : 1;
      return 0;
    }
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Canonicalizing builders

namespace {

// term = coefficient * rest
std::pair<Rational, Expr> split_coefficient(const Expr& term) {
  if (term.is_constant()) return {term.value(), one_expr()};
  if (term.kind() == NodeKind::Product && term.operands().front().is_constant()) {
    auto ops = term.operands();
    if (ops.size() == 2) return {ops[0].value(), ops[1]};
    return {ops[0].value(), Expr::raw_product(std::vector<Expr>(ops.begin() + 1, ops.end()))};
  }
  return {Rational(1), term};
}

Expr scale(const Expr& rest, const Rational& c) {
  if (c == 1) return rest;
  if (rest.is_one()) return Expr(c);
  std::vector<Expr> ops{Expr(c)};
  if (rest.kind() == NodeKind::Product) {
    ops.insert(ops.end(), rest.operands().begin(), rest.operands().end());
  } else {
    ops.push_back(rest);
  }
  return Expr::raw_product(std::move(ops));
}

void flatten_sum(const Expr& t, Rational& constant, std::map<Expr, Rational, ExprLess>& acc) {
  if (t.kind() == NodeKind::Sum) {
    for (const auto& op : t.operands()) flatten_sum(op, constant, acc);
    return;
  }
  if (t.is_constant()) {
    constant += t.value();
    return;
  }
  auto [c, rest] = split_coefficient(t);
  acc[rest] += c;
}

// Exact integer power of a rational; exponent bounded to keep folding cheap.
std::optional<Rational> rational_power(const Rational& b, const mpz_class& e) {
  if (!e.fits_slong_p()) return std::nullopt;
  long n = e.get_si();
  if (n > 4096 || n < -4096) return std::nullopt;
  if (sgn(b) == 0) {
    if (n < 0) return std::nullopt;
    return Rational(n == 0 ? 1 : 0);
  }
  unsigned long m = static_cast<unsigned long>(n < 0 ? -n : n);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), b.get_num_mpz_t(), m);
  mpz_pow_ui(den.get_mpz_t(), b.get_den_mpz_t(), m);
  Rational r = n < 0 ? Rational(den, num) : Rational(num, den);
  r.canonicalize();
  return r;
}

std::optional<Rational> exact_root(const Rational& b, unsigned long k) {
  if (sgn(b) < 0) return std::nullopt;
  mpz_class rn, rd;
  if (mpz_root(rn.get_mpz_t(), b.get_num_mpz_t(), k) == 0) return std::nullopt;
  if (mpz_root(rd.get_mpz_t(), b.get_den_mpz_t(), k) == 0) return std::nullopt;
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

}  // namespace

Expr add(std::vector<Expr> terms) {
  Rational constant = 0;
  std::map<Expr, Rational, ExprLess> acc;
  for (const auto& t : terms) flatten_sum(t, constant, acc);
  std::vector<Expr> out;
  if (sgn(constant) != 0) out.emplace_back(constant);
  for (const auto& [rest, c] : acc) {
    if (sgn(c) == 0) continue;
    out.push_back(scale(rest, c));
  }
  if (out.empty()) return zero_expr();
  if (out.size() == 1) return out.front();
  return Expr::raw_sum(std::move(out));
}

Expr mul(std::vector<Expr> factors) {
  Rational coeff = 1;
  std::map<Expr, std::vector<Expr>, ExprLess> acc;
  std::function<bool(const Expr&)> flatten = [&](const Expr& f) -> bool {
    if (f.kind() == NodeKind::Product) {
      for (const auto& op : f.operands())
        if (!flatten(op)) return false;
      return true;
    }
    if (f.is_constant()) {
      coeff *= f.value();
      return sgn(coeff) != 0;
    }
    if (f.kind() == NodeKind::Power) {
      acc[f.base()].push_back(f.exponent());
    } else {
      acc[f].push_back(one_expr());
    }
    return true;
  };
  for (const auto& f : factors)
    if (!flatten(f)) return zero_expr();

  std::vector<Expr> out;
  std::vector<Expr> redo;
  for (auto& [base, exps] : acc) {
    Expr e = exps.size() == 1 ? exps.front() : add(std::move(exps));
    Expr p = pow(base, e);
    if (p.is_constant()) {
      coeff *= p.value();
      if (sgn(coeff) == 0) return zero_expr();
    } else if (p.kind() == NodeKind::Product) {
      redo.push_back(p);
    } else {
      out.push_back(p);
    }
  }
  if (!redo.empty()) {
    out.insert(out.end(), redo.begin(), redo.end());
    out.emplace_back(coeff);
    return mul(std::move(out));
  }
  std::sort(out.begin(), out.end(), ExprLess{});
  if (out.empty()) return Expr(coeff);
  if (coeff == 1 && out.size() == 1) return out.front();
  if (coeff != 1) out.insert(out.begin(), Expr(coeff));
  return Expr::raw_product(std::move(out));
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant()) {
    const Rational& e = exponent.value();
    if (sgn(e) == 0) return one_expr();
    if (e == 1) return base;
    if (base.is_constant()) {
      const Rational& b = base.value();
      if (e.get_den() == 1) {
        if (auto r = rational_power(b, e.get_num())) return Expr(*r);
      } else if (sgn(b) == 0 && sgn(e) > 0) {
        return zero_expr();
      } else if (sgn(b) > 0 && e.get_den().fits_ulong_p()) {
        if (auto root = exact_root(b, e.get_den().get_ui()))
          if (auto r = rational_power(*root, e.get_num())) return Expr(*r);
      }
      return Expr::raw_power(base, exponent);
    }
    if (e.get_den() == 1) {
      if (base.is_imaginary_unit()) {
        mpz_class m = e.get_num() % 4;
        if (m < 0) m += 4;
        switch (m.get_si()) {
          case 0: return one_expr();
          case 1: return base;
          case 2: return Expr(-1);
          default: return Expr::raw_product({Expr(-1), base});
        }
      }
      if (base.kind() == NodeKind::Power) return pow(base.base(), mul({base.exponent(), exponent}));
      if (base.kind() == NodeKind::Product) {
        std::vector<Expr> fs;
        for (const auto& f : base.operands()) fs.push_back(pow(f, exponent));
        return mul(std::move(fs));
      }
    }
  }
  if (base.is_one()) return one_expr();
  return Expr::raw_power(base, exponent);
}

Expr apply(Function fn, std::vector<Expr> args) {
  const Expr& a = args.front();
  switch (fn) {
    case Function::Exp:
      if (a.is_zero()) return one_expr();
      if (a.kind() == NodeKind::Apply && a.function() == Function::Ln) return a.operands()[0];
      break;
    case Function::Ln:
      if (a.is_one()) return zero_expr();
      break;
    case Function::Sin:
    case Function::Arctan:
      if (a.is_zero()) return zero_expr();
      break;
    case Function::Cos:
      if (a.is_zero()) return one_expr();
      break;
    case Function::Sqrt:
      if (a.is_constant()) {
        if (auto r = exact_root(a.value(), 2)) return Expr(*r);
      }
      break;
    case Function::Arctan2:
      if (a.is_zero() && args[1].is_constant() && sgn(args[1].value()) > 0) return zero_expr();
      break;
  }
  return Expr::raw_apply(fn, std::move(args));
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Expr(-1))}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }

Expr exp(const Expr& a) { return apply(Function::Exp, {a}); }
Expr ln(const Expr& a) { return apply(Function::Ln, {a}); }
Expr sin(const Expr& a) { return apply(Function::Sin, {a}); }
Expr cos(const Expr& a) { return apply(Function::Cos, {a}); }
Expr arctan(const Expr& a) { return apply(Function::Arctan, {a}); }
Expr arctan2(const Expr& y, const Expr& x) { return apply(Function::Arctan2, {y, x}); }
Expr sqrt(const Expr& a) { return apply(Function::Sqrt, {a}); }

// ---------------------------------------------------------------------------
// Traversals

namespace {

using Memo = std::unordered_map<const detail::Node*, Expr>;

Expr rebuild(const Expr& e, const std::vector<Expr>& ops) {
  switch (e.kind()) {
    case NodeKind::Sum: return add(ops);
    case NodeKind::Product: return mul(ops);
    case NodeKind::Power: return pow(ops[0], ops[1]);
    case NodeKind::Apply: return apply(e.function(), ops);
    default: return e;
  }
}

Expr normalize_rec(const Expr& e, Memo& memo) {
  if (e.is_constant() || e.is_symbol()) return e;
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  std::vector<Expr> ops;
  ops.reserve(e.operands().size());
  for (const auto& op : e.operands()) ops.push_back(normalize_rec(op, memo));
  Expr r = rebuild(e, ops);
  memo.emplace(e.node(), r);
  return r;
}

void check_size(std::size_t n, std::size_t max_terms) {
  if (n > max_terms)
    throw Error(ErrorCode::ExpansionTooLarge, "expansion exceeds " + std::to_string(max_terms) + " terms");
}

std::vector<Expr> terms_of(const Expr& e) {
  if (e.kind() == NodeKind::Sum) return {e.operands().begin(), e.operands().end()};
  return {e};
}

std::vector<Expr> multiply_terms(const std::vector<Expr>& a, const std::vector<Expr>& b, std::size_t max_terms) {
  check_size(a.size() * b.size(), max_terms);
  std::vector<Expr> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(mul({x, y}));
  // Collect early so repeated multiplication stays small.
  return terms_of(add(std::move(out)));
}

Expr expand_rec(const Expr& e, std::size_t max_terms, Memo& memo) {
  if (e.is_constant() || e.is_symbol()) return e;
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  Expr r;
  switch (e.kind()) {
    case NodeKind::Sum: {
      std::vector<Expr> ts;
      for (const auto& op : e.operands()) ts.push_back(expand_rec(op, max_terms, memo));
      r = add(std::move(ts));
      break;
    }
    case NodeKind::Product: {
      std::vector<Expr> acc{one_expr()};
      for (const auto& op : e.operands()) acc = multiply_terms(acc, terms_of(expand_rec(op, max_terms, memo)), max_terms);
      r = add(std::move(acc));
      break;
    }
    case NodeKind::Power: {
      Expr b = expand_rec(e.base(), max_terms, memo);
      Expr x = expand_rec(e.exponent(), max_terms, memo);
      if (b.kind() == NodeKind::Sum && x.is_integer() && sgn(x.value()) > 0 && x.value().get_num().fits_slong_p()) {
        long n = x.value().get_num().get_si();
        std::vector<Expr> acc{one_expr()};
        auto bt = terms_of(b);
        for (long i = 0; i < n; ++i) acc = multiply_terms(acc, bt, max_terms);
        r = add(std::move(acc));
      } else {
        r = pow(b, x);
        if (r.kind() == NodeKind::Product || r.kind() == NodeKind::Sum) r = expand_rec(r, max_terms, memo);
      }
      break;
    }
    case NodeKind::Apply: {
      std::vector<Expr> args;
      for (const auto& op : e.operands()) args.push_back(expand_rec(op, max_terms, memo));
      r = apply(e.function(), std::move(args));
      break;
    }
    default:
      r = e;
  }
  memo.emplace(e.node(), r);
  return r;
}

void collect_symbols(const Expr& e, std::set<std::string>& out, std::unordered_map<const detail::Node*, bool>& seen) {
  if (e.is_symbol()) {
    if (!e.is_imaginary_unit()) out.insert(e.name());
    return;
  }
  if (!seen.emplace(e.node(), true).second) return;
  for (const auto& op : e.operands()) collect_symbols(op, out, seen);
}

}  // namespace

Expr normalize(const Expr& e) {
  Memo memo;
  return normalize_rec(e, memo);
}

Expr expand(const Expr& e, std::size_t max_terms) {
  Memo memo;
  return expand_rec(e, max_terms, memo);
}

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  std::unordered_map<const detail::Node*, bool> seen;
  collect_symbols(e, out, seen);
  return out;
}

bool depends_on(const Expr& e, std::string_view symbol) {
  std::unordered_map<const detail::Node*, bool> memo;
  std::function<bool(const Expr&)> rec = [&](const Expr& x) -> bool {
    if (x.is_symbol()) return x.name() == symbol;
    if (x.is_constant()) return false;
    if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
    bool r = false;
    for (const auto& op : x.operands())
      if (rec(op)) {
        r = true;
        break;
      }
    memo.emplace(x.node(), r);
    return r;
  };
  return rec(e);
}

bool contains_imaginary_unit(const Expr& e) { return depends_on(e, kImaginaryName); }

Expr substitute(const Expr& e, const Bindings& bindings) {
  Memo memo;
  std::function<Expr(const Expr&)> rec = [&](const Expr& x) -> Expr {
    if (x.is_symbol()) {
      auto it = bindings.find(x.name());
      return it == bindings.end() ? x : it->second;
    }
    if (x.is_constant()) return x;
    if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
    std::vector<Expr> ops;
    for (const auto& op : x.operands()) ops.push_back(rec(op));
    Expr r = rebuild(x, ops);
    memo.emplace(x.node(), r);
    return r;
  };
  return normalize(rec(e));
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& op : e.operands()) n += node_count(op);
  return n;
}

}  // namespace clin
