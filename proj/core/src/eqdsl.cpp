#include "clin/eqdsl.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "clin/complexify.hpp"
#include "clin/error.hpp"
#include "lexer.hpp"

namespace clin {

using detail::Tok;
using detail::Token;

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::ODE1: return "ode1";
    case SystemKind::ODE2: return "ode2";
    case SystemKind::PDE1: return "pde1";
    case SystemKind::PDE2: return "pde2";
  }
  return "?";
}

bool is_ode(SystemKind kind) { return kind == SystemKind::ODE1 || kind == SystemKind::ODE2; }

int order(SystemKind kind) { return kind == SystemKind::ODE1 || kind == SystemKind::PDE1 ? 1 : 2; }

// ---------------------------------------------------------------------------
// Derivative naming

namespace {

// Splits `suffix` into a sequence of names from `alphabet`.
std::optional<std::vector<std::size_t>> decompose(std::string_view suffix, const std::vector<std::string>& alphabet) {
  if (suffix.empty()) return std::vector<std::size_t>{};
  for (std::size_t k = 0; k < alphabet.size(); ++k) {
    const std::string& a = alphabet[k];
    if (!a.empty() && suffix.substr(0, a.size()) == a) {
      if (auto rest = decompose(suffix.substr(a.size()), alphabet)) {
        rest->insert(rest->begin(), k);
        return rest;
      }
    }
  }
  return std::nullopt;
}

std::string join_indices(std::vector<std::size_t> idx, const std::vector<std::string>& alphabet) {
  std::sort(idx.begin(), idx.end());
  std::string s;
  for (auto k : idx) s += alphabet[k];
  return s;
}

}  // namespace

std::string derivative_symbol(const std::string& dependent, std::vector<std::string> wrt,
                              const std::vector<std::string>& independents, bool ode) {
  if (ode) return dependent + std::string(wrt.size(), '\'');
  std::vector<std::size_t> idx;
  for (const auto& w : wrt) {
    auto it = std::find(independents.begin(), independents.end(), w);
    if (it == independents.end()) throw Error(ErrorCode::InvalidArgument, w + " is not an independent variable");
    idx.push_back(static_cast<std::size_t>(it - independents.begin()));
  }
  return dependent + "_" + join_indices(idx, independents);
}

std::vector<std::string> SystemSpec::first_derivatives() const {
  std::vector<std::string> out;
  for (const auto& d : dependents)
    for (const auto& v : independents) out.push_back(derivative_symbol(d, {v}, independents, is_ode(kind)));
  return out;
}

std::vector<std::string> SystemSpec::second_derivatives() const {
  std::vector<std::string> out;
  for (const auto& d : dependents)
    for (std::size_t a = 0; a < independents.size(); ++a)
      for (std::size_t b = a; b < independents.size(); ++b)
        out.push_back(derivative_symbol(d, {independents[a], independents[b]}, independents, is_ode(kind)));
  return out;
}

std::vector<std::string> SystemSpec::derivative_symbols() const {
  auto out = first_derivatives();
  if (order(kind) == 2) {
    auto second = second_derivatives();
    out.insert(out.end(), second.begin(), second.end());
  }
  return out;
}

PartialRule SystemSpec::partial_rule() const {
  if (functions.empty()) return {};
  auto decls = std::make_shared<std::vector<FunctionDecl>>(functions);
  auto rule = std::make_shared<PartialRule>();
  std::weak_ptr<PartialRule> weak = rule;
  auto pairs = std::make_shared<std::vector<std::array<std::string, 2>>>(analytic);
  *rule = [decls, pairs, weak](const std::string& symbol, const std::string& wrt) -> std::optional<Expr> {
    auto self = weak.lock();
    for (const auto& pair : *pairs) {
      // Partials of an analytic pair are w1_p^n, w2_p^n only:
      // d(w1_n) = w1_{n+1} dp - w2_{n+1} dq, d(w2_n) = w2_{n+1} dp + w1_{n+1} dq.
      for (int m = 0; m < 2; ++m) {
        const std::string& name = pair[static_cast<std::size_t>(m)];
        if (symbol.compare(0, name.size(), name) != 0) continue;
        const FunctionDecl& d = *std::find_if(decls->begin(), decls->end(), [&](const FunctionDecl& f) { return f.name == name; });
        std::size_t n = 0;
        if (symbol.size() > name.size()) {
          if (symbol[name.size()] != '_') continue;
          auto idx = decompose(std::string_view(symbol).substr(name.size() + 1), d.formals);
          if (!idx || std::any_of(idx->begin(), idx->end(), [](std::size_t k) { return k != 0; })) continue;
          n = idx->size();
        }
        const std::string suffix = join_indices(std::vector<std::size_t>(n + 1, 0), d.formals);
        const Expr w1 = Expr::symbol(pair[0] + "_" + suffix);
        const Expr w2 = Expr::symbol(pair[1] + "_" + suffix);
        const PartialRule inner = self ? *self : PartialRule{};
        const Expr dp = differentiate(d.arguments[0], wrt, inner);
        const Expr dq = differentiate(d.arguments[1], wrt, inner);
        if (m == 0) return normalize(w1 * dp - w2 * dq);
        return normalize(w2 * dp + w1 * dq);
      }
    }
    for (const auto& d : *decls) {
      std::string_view suffix;
      if (symbol == d.name) {
        suffix = "";
      } else if (symbol.size() > d.name.size() + 1 && symbol.compare(0, d.name.size(), d.name) == 0 &&
                 symbol[d.name.size()] == '_') {
        suffix = std::string_view(symbol).substr(d.name.size() + 1);
      } else {
        continue;
      }
      auto idx = decompose(suffix, d.formals);
      if (!idx) continue;
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < d.formals.size(); ++k) {
        Expr da = differentiate(d.arguments[k], wrt, self ? *self : PartialRule{});
        if (da.is_zero()) continue;
        auto next = *idx;
        next.push_back(k);
        terms.push_back(Expr::symbol(d.name + "_" + join_indices(next, d.formals)) * da);
      }
      return add(std::move(terms));
    }
    return std::nullopt;
  };
  return [rule](const std::string& s, const std::string& w) { return (*rule)(s, w); };
}

namespace {

Bindings bindings_of(const std::vector<Parameter>& params) {
  Bindings b;
  for (const auto& p : params)
    if (p.value) b.emplace(p.name, *p.value);
  return b;
}

}  // namespace

Bindings SystemSpec::bindings() const { return bindings_of(params); }
Bindings PointTransformation::bindings() const { return bindings_of(params); }
Bindings Solution::bindings() const { return bindings_of(params); }
Bindings FieldSet::bindings() const { return bindings_of(params); }

Bindings SystemSpec::aux_definitions() const {
  if (independents.size() != 2) return {};
  const auto& [x, y] = std::tie(independents[0], independents[1]);
  auto d = [&](const std::string& dep, const std::string& v) {
    return Expr::symbol(derivative_symbol(dep, {v}, independents, false));
  };
  const Rational half(1, 2);
  Bindings b;
  b.emplace(aux[0], Expr(half) * (d(dependents[0], x) + d(dependents[1], y)));
  b.emplace(aux[1], Expr(half) * (d(dependents[1], x) - d(dependents[0], y)));
  return b;
}

std::array<std::string, 2> principal_unknowns(const SystemSpec& sys) {
  if (sys.kind == SystemKind::PDE2) return {"%P", "%Q"};
  const std::size_t n = static_cast<std::size_t>(order(sys.kind));
  const auto& x = sys.independents.front();
  return {derivative_symbol(sys.dependents[0], std::vector<std::string>(n, x), sys.independents, is_ode(sys.kind)),
          derivative_symbol(sys.dependents[1], std::vector<std::string>(n, x), sys.independents, is_ode(sys.kind))};
}

Expr principal_residual(const SystemSpec& sys, const Equation& eq) {
  const Expr r = eq.lhs - eq.rhs;
  if (sys.kind != SystemKind::PDE2) return r;
  const auto& iv = sys.independents;
  auto d2 = [&](const std::string& dep, const std::string& a, const std::string& b) {
    return Expr::symbol(derivative_symbol(dep, {a, b}, iv, false));
  };
  const auto& f = sys.dependents[0];
  const auto& g = sys.dependents[1];
  const auto& x = iv[0];
  const auto& y = iv[1];
  const auto u = principal_unknowns(sys);
  Bindings b;
  b.emplace(derivative_symbol(f, {x, x}, iv, false), Expr::symbol(u[0]) + d2(f, y, y) - Expr(2) * d2(g, x, y));
  b.emplace(derivative_symbol(g, {x, x}, iv, false), Expr::symbol(u[1]) + d2(g, y, y) + Expr(2) * d2(f, x, y));
  Expr out = substitute(r, b);
  const auto second = sys.second_derivatives();
  if (std::any_of(second.begin(), second.end(), [&](const std::string& s) { return depends_on(out, s); }))
    out = expand(out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

const std::set<std::string, std::less<>> kDeclKeywords{"vars", "params", "const", "func", "analytic", "aux", "from", "to", "complex"};

struct Scope {
  bool open = false;
  std::map<std::string, Expr, std::less<>> names;
  std::function<std::optional<std::string>(const std::string&)> derivative;
};

struct Located {
  Equation eq;
  Token at;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(detail::tokenize(text)) {}

  Scope scope;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    take();
    return true;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& msg, std::vector<std::string> expected = {},
                                ErrorCode code = ErrorCode::SyntaxError) {
    throw ParseError(code, msg, t.line, t.column, std::move(expected));
  }

  Token expect(Tok k) {
    if (peek().kind != k) {
      fail(peek(), "expected " + std::string(detail::describe(k)) + ", found " + found(peek()),
           {std::string(detail::describe(k))});
    }
    return take();
  }

  static std::string found(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }

  Token expect_ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail(peek(), "expected " + what + ", found " + found(peek()), {what});
    return take();
  }

  // expr := term (('+'|'-') term)*
  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept(Tok::Plus))
        e = e + term();
      else if (accept(Tok::Minus))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept(Tok::Star)) {
        e = e * unary();
      } else if (peek().kind == Tok::Slash) {
        const Token at = take();
        Expr d = unary();
        if (d.is_zero()) fail(at, "division by the constant zero");
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept(Tok::Minus)) return -unary();
    if (accept(Tok::Plus)) return unary();
    return power();
  }

  Expr power() {
    Expr b = primary();
    if (peek().kind == Tok::Caret) {
      const Token at = take();
      Expr x = unary();
      if (b.is_zero() && x.is_constant() && sgn(x.value()) <= 0) fail(at, "zero to a non-positive power");
      return pow(b, x);
    }
    return b;
  }

  Expr primary() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Number:
        take();
        return Expr(t.number);
      case Tok::Imag:
        take();
        return Expr::imaginary_unit();
      case Tok::LParen: {
        take();
        Expr e = expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident:
        take();
        if (peek().kind == Tok::LParen) return call(t);
        return resolve(t);
      default:
        fail(t, "expected an operand, found " + found(t), {"number", "identifier", "'('"});
    }
  }

  Expr call(const Token& name) {
    auto fn = function_from_name(name.text);
    if (!fn) fail(name, "unknown function " + name.text, {}, ErrorCode::UndeclaredSymbol);
    take();
    std::vector<Expr> args{expr()};
    while (accept(Tok::Comma)) args.push_back(expr());
    const Token close = expect(Tok::RParen);
    if (static_cast<int>(args.size()) != function_arity(*fn)) {
      fail(close, name.text + " takes " + std::to_string(function_arity(*fn)) + " argument(s)");
    }
    return apply(*fn, std::move(args));
  }

  Expr resolve(const Token& t) {
    if (auto it = scope.names.find(t.text); it != scope.names.end()) return it->second;
    if (scope.derivative) {
      if (auto d = scope.derivative(t.text)) return Expr::symbol(*d);
    }
    if (scope.open) return Expr::symbol(t.text);
    fail(t, "undeclared symbol " + t.text, {}, ErrorCode::UndeclaredSymbol);
  }

  void declare(const Token& t, Expr value) {
    if (scope.names.count(t.text) || function_from_name(t.text)) fail(t, t.text + " is already declared");
    scope.names.emplace(t.text, std::move(value));
  }

  std::vector<Token> ident_list(const std::string& what) {
    std::vector<Token> out{expect_ident(what)};
    while (accept(Tok::Comma)) out.push_back(expect_ident(what));
    expect(Tok::Semi);
    return out;
  }

  std::vector<Parameter> param_list() {
    std::vector<Parameter> out;
    do {
      const Token t = expect_ident("parameter name");
      Parameter p{t.text, std::nullopt};
      if (accept(Tok::Assign)) p.value = expr();
      declare(t, Expr::symbol(t.text));
      out.push_back(std::move(p));
    } while (accept(Tok::Comma));
    expect(Tok::Semi);
    return out;
  }

  bool at_decl() const {
    return peek().kind == Tok::Ident && peek(1).kind == Tok::Colon && kDeclKeywords.count(peek().text);
  }

  bool at_let() const {
    return peek().kind == Tok::Ident && peek().text == "let" && peek(1).kind == Tok::Ident &&
           peek(2).kind == Tok::Assign;
  }

  void let_binding() {
    take();
    const Token name = take();
    take();
    Expr value = expr();
    expect(Tok::Semi);
    declare(name, value);
  }

  Located equation() {
    const Token at = peek();
    Expr lhs = expr();
    expect(Tok::Assign);
    Expr rhs = expr();
    expect(Tok::Semi);
    return {{lhs, rhs}, at};
  }

  std::pair<std::string, std::string> header(const std::vector<std::string>& keywords) {
    const Token kw = peek();
    if (kw.kind != Tok::Ident || std::find(keywords.begin(), keywords.end(), kw.text) == keywords.end())
      fail(kw, "expected a block keyword, found " + found(kw), keywords);
    take();
    std::string name;
    if (peek().kind == Tok::Ident) name = take().text;
    expect(Tok::LBrace);
    return {kw.text, name};
  }

  void finish() {
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + found(peek()) + " after block", {"end of input"});
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Returns the declared variable list, or the defaults.
std::vector<std::string> names_of(const std::vector<Token>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.text);
  return out;
}

SystemKind kind_from(const std::string& kw) {
  if (kw == "ode1") return SystemKind::ODE1;
  if (kw == "ode2") return SystemKind::ODE2;
  if (kw == "pde1") return SystemKind::PDE1;
  return SystemKind::PDE2;
}

bool mentions_any(const Expr& e, const std::vector<std::string>& names) {
  return std::any_of(names.begin(), names.end(), [&](const std::string& n) { return depends_on(e, n); });
}

bool linear_in(const Expr& e, const std::vector<std::string>& names) {
  try {
    collect_polynomial(e, names, 1);
    return true;
  } catch (const Error& err) {
    if (err.code() == ErrorCode::NotPolynomial || err.code() == ErrorCode::DegreeTooHigh) return false;
    throw;
  }
}

void validate_system(SystemSpec& sys, std::vector<Located>& eqs, const Token& close) {
  const auto first = sys.first_derivatives();
  const auto second = order(sys.kind) == 2 ? sys.second_derivatives() : std::vector<std::string>{};
  std::set<std::string> seen_lhs;
  std::vector<Located> principal;
  for (auto& le : eqs) {
    const Expr r = le.eq.lhs - le.eq.rhs;
    bool is_constraint = false;
    switch (sys.kind) {
      case SystemKind::ODE1:
      case SystemKind::PDE1:
        if (!mentions_any(r, first)) Parser::fail(le.at, "equation has no first derivative", {}, ErrorCode::WrongLeftSide);
        break;
      case SystemKind::ODE2:
        if (!mentions_any(r, second))
          Parser::fail(le.at, "left side must involve " + second[0] + " or " + second[1], {}, ErrorCode::WrongLeftSide);
        if (!linear_in(r, second))
          Parser::fail(le.at, "equation is not linear in the second derivatives", {}, ErrorCode::WrongLeftSide);
        break;
      case SystemKind::PDE2: {
        if (!mentions_any(r, second)) {
          if (!mentions_any(r, first))
            Parser::fail(le.at, "equation has no derivatives", {}, ErrorCode::WrongLeftSide);
          is_constraint = true;
          break;
        }
        const Expr c = principal_residual(sys, le.eq);
        if (mentions_any(c, second))
          Parser::fail(le.at, "second derivatives do not form the combinations f_xx - f_yy + 2g_xy and g_xx - g_yy - 2f_xy",
                       {}, ErrorCode::WrongLeftSide);
        const auto u = principal_unknowns(sys);
        if (!linear_in(c, {u[0], u[1]}))
          Parser::fail(le.at, "equation is not linear in the second-order combinations", {}, ErrorCode::WrongLeftSide);
        break;
      }
    }
    if (is_constraint) {
      sys.constraints.push_back(le.eq);
      continue;
    }
    if (le.eq.lhs.is_symbol()) {
      if (!seen_lhs.insert(le.eq.lhs.name()).second)
        Parser::fail(le.at, "second equation for " + le.eq.lhs.name(), {}, ErrorCode::DuplicateEquation);
    }
    if (principal.size() == 2) Parser::fail(le.at, "more than two equations", {}, ErrorCode::DuplicateEquation);
    principal.push_back(le);
  }
  if (principal.size() < 2)
    Parser::fail(close, principal.empty() ? "block has no equations" : "block needs two equations", {"equation"});
  for (auto& le : principal) sys.equations.push_back(le.eq);
  const std::vector<std::string> aux(sys.aux.begin(), sys.aux.end());
  for (const auto& e : sys.equations)
    if (mentions_any(e.lhs, aux) || mentions_any(e.rhs, aux)) sys.uses_aux = true;
}

void check_fresh(Parser& p, const Token& t, const std::set<std::string>& taken) {
  if (taken.count(t.text)) p.fail(t, t.text + " is already declared");
}

}  // namespace

SystemSpec parse_system(std::string_view text) {
  Parser p(text);
  auto [kw, name] = p.header({"ode1", "ode2", "pde1", "pde2"});
  SystemSpec sys;
  sys.kind = kind_from(kw);
  sys.name = name;
  const bool ode = is_ode(sys.kind);
  const std::size_t n_indep = ode ? 1 : 2;
  bool vars_set = false;
  bool aux_set = false;
  std::vector<Token> var_tokens;

  auto install_vars = [&] {
    if (vars_set) return;
    vars_set = true;
    if (sys.independents.empty()) sys.independents = ode ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
    for (const auto& v : sys.independents) p.scope.names.emplace(v, Expr::symbol(v));
    for (const auto& d : sys.dependents) p.scope.names.emplace(d, Expr::symbol(d));
    if (!ode) {
      for (const auto& a : sys.aux) {
        if (p.scope.names.count(a)) throw Error(ErrorCode::SyntaxError, "aux name " + a + " collides with a variable");
        p.scope.names.emplace(a, Expr::symbol(a));
      }
    }
    const int max_order = order(sys.kind);
    p.scope.derivative = [&sys, ode, max_order](const std::string& tok) -> std::optional<std::string> {
      for (const auto& d : sys.dependents) {
        if (ode) {
          if (tok.size() > d.size() && tok.compare(0, d.size(), d) == 0) {
            const std::size_t primes = tok.size() - d.size();
            if (std::all_of(tok.begin() + d.size(), tok.end(), [](char c) { return c == '\''; }) &&
                primes <= static_cast<std::size_t>(max_order))
              return tok;
          }
        } else if (tok.size() > d.size() + 1 && tok.compare(0, d.size(), d) == 0 && tok[d.size()] == '_') {
          auto idx = decompose(std::string_view(tok).substr(d.size() + 1), sys.independents);
          if (idx && !idx->empty() && idx->size() <= static_cast<std::size_t>(max_order))
            return d + "_" + join_indices(*idx, sys.independents);
        }
      }
      return std::nullopt;
    };
  };

  std::vector<Located> eqs;
  while (p.peek().kind != Tok::RBrace) {
    if (p.peek().kind == Tok::End) p.fail(p.peek(), "unterminated block", {"'}'"});
    if (p.at_decl()) {
      const Token kwt = p.take();
      p.take();
      const std::string& k = kwt.text;
      if (k == "vars") {
        if (vars_set) p.fail(kwt, "vars must come first and only once");
        var_tokens = p.ident_list("variable name");
        if (var_tokens.size() != n_indep + 2)
          p.fail(kwt, "vars needs " + std::to_string(n_indep) + " independent and 2 dependent names");
        auto names = names_of(var_tokens);
        std::set<std::string> uniq(names.begin(), names.end());
        if (uniq.size() != names.size()) p.fail(kwt, "repeated variable name");
        sys.independents.assign(names.begin(), names.begin() + static_cast<long>(n_indep));
        sys.dependents = {names[n_indep], names[n_indep + 1]};
      } else if (k == "aux") {
        if (ode) p.fail(kwt, "aux is only meaningful in pde blocks");
        if (vars_set || aux_set) p.fail(kwt, "aux must precede equations and appear once");
        auto ts = p.ident_list("aux name");
        if (ts.size() != 2) p.fail(kwt, "aux needs exactly two names");
        sys.aux = {ts[0].text, ts[1].text};
        aux_set = true;
      } else if (k == "params" || k == "const") {
        install_vars();
        auto ps = p.param_list();
        sys.params.insert(sys.params.end(), ps.begin(), ps.end());
      } else if (k == "func") {
        install_vars();
        do {
          const Token fname = p.expect_ident("function name");
          p.expect(Tok::LParen);
          FunctionDecl d{fname.text, {}, {}};
          do {
            const Token formal = p.expect_ident("argument name");
            d.formals.push_back(formal.text);
            d.arguments.push_back(p.accept(Tok::Assign) ? p.expr() : p.resolve(formal));
          } while (p.accept(Tok::Comma));
          p.expect(Tok::RParen);
          p.declare(fname, Expr::symbol(fname.text));
          sys.functions.push_back(std::move(d));
        } while (p.accept(Tok::Comma));
        p.expect(Tok::Semi);
      } else if (k == "analytic") {
        auto ts = p.ident_list("function name");
        if (ts.size() != 2) p.fail(kwt, "analytic needs exactly two function names");
        std::array<const FunctionDecl*, 2> fs{};
        for (int m = 0; m < 2; ++m) {
          for (const auto& d : sys.functions)
            if (d.name == ts[static_cast<std::size_t>(m)].text) fs[static_cast<std::size_t>(m)] = &d;
          if (!fs[static_cast<std::size_t>(m)])
            p.fail(ts[static_cast<std::size_t>(m)], ts[static_cast<std::size_t>(m)].text + " is not a declared func", {},
                   ErrorCode::UndeclaredSymbol);
        }
        if (fs[0]->formals.size() != 2 || fs[0]->formals != fs[1]->formals || fs[0]->arguments != fs[1]->arguments)
          p.fail(kwt, "an analytic pair needs two funcs of the same two arguments");
        sys.analytic.push_back({ts[0].text, ts[1].text});
      } else {
        p.fail(kwt, k + " is not valid in a system block");
      }
      continue;
    }
    install_vars();
    if (p.at_let()) {
      p.let_binding();
      continue;
    }
    eqs.push_back(p.equation());
  }
  install_vars();
  const Token close = p.take();
  p.finish();
  validate_system(sys, eqs, close);
  return sys;
}

PointTransformation parse_transformation(std::string_view text) {
  Parser p(text);
  auto [kw, name] = p.header({"map"});
  PointTransformation map;
  map.name = name;
  std::vector<bool> defined;
  while (p.peek().kind != Tok::RBrace) {
    if (p.peek().kind == Tok::End) p.fail(p.peek(), "unterminated block", {"'}'"});
    if (p.at_decl()) {
      const Token kwt = p.take();
      p.take();
      if (kwt.text == "from") {
        if (!map.source.empty()) p.fail(kwt, "from declared twice");
        auto ts = p.ident_list("variable name");
        std::set<std::string> seen;
        for (const auto& t : ts) {
          check_fresh(p, t, seen);
          seen.insert(t.text);
          p.declare(t, Expr::symbol(t.text));
          map.source.push_back(t.text);
        }
      } else if (kwt.text == "to") {
        if (!map.target.empty()) p.fail(kwt, "to declared twice");
        auto ts = p.ident_list("variable name");
        std::set<std::string> seen;
        for (const auto& t : ts) {
          check_fresh(p, t, seen);
          seen.insert(t.text);
        }
        map.target = names_of(ts);
        defined.assign(map.target.size(), false);
        map.components.assign(map.target.size(), Expr(0));
      } else if (kwt.text == "params" || kwt.text == "const") {
        auto ps = p.param_list();
        map.params.insert(map.params.end(), ps.begin(), ps.end());
      } else {
        p.fail(kwt, kwt.text + " is not valid in a map block");
      }
      continue;
    }
    if (p.at_let()) {
      p.let_binding();
      continue;
    }
    if (map.source.empty() || map.target.empty()) p.fail(p.peek(), "map needs from: and to: before equations", {"from", "to"});
    const Token lhs = p.expect_ident("target variable");
    auto it = std::find(map.target.begin(), map.target.end(), lhs.text);
    if (it == map.target.end()) p.fail(lhs, lhs.text + " is not a target variable", map.target, ErrorCode::WrongLeftSide);
    const auto k = static_cast<std::size_t>(it - map.target.begin());
    if (defined[k]) p.fail(lhs, "second definition of " + lhs.text, {}, ErrorCode::DuplicateEquation);
    p.expect(Tok::Assign);
    map.components[k] = p.expr();
    p.expect(Tok::Semi);
    defined[k] = true;
  }
  const Token close = p.take();
  p.finish();
  if (map.target.empty()) p.fail(close, "map has no targets", {"to"});
  std::vector<std::string> missing;
  for (std::size_t k = 0; k < map.target.size(); ++k)
    if (!defined[k]) missing.push_back(map.target[k]);
  if (!missing.empty()) p.fail(close, "missing definition for " + missing.front(), missing);
  if (map.target.size() == 4 && map.source.size() != 3 && map.source.size() != 4)
    p.fail(close, "four targets need a three- or four-variable source");
  if (map.target.size() != 3 && map.target.size() != 4) p.fail(close, "a map has three or four targets");
  return map;
}

FieldSet parse_field_set(std::string_view text) {
  Parser p(text);
  auto [kw, name] = p.header({"fields"});
  FieldSet set;
  set.name = name;
  while (p.peek().kind != Tok::RBrace) {
    if (p.peek().kind == Tok::End) p.fail(p.peek(), "unterminated block", {"'}'"});
    if (p.at_decl()) {
      const Token kwt = p.take();
      p.take();
      if (kwt.text == "vars") {
        if (!set.variables.empty()) p.fail(kwt, "vars declared twice");
        for (const auto& t : p.ident_list("variable name")) {
          p.declare(t, Expr::symbol(t.text));
          set.variables.push_back(t.text);
        }
      } else if (kwt.text == "params" || kwt.text == "const") {
        auto ps = p.param_list();
        set.params.insert(set.params.end(), ps.begin(), ps.end());
      } else {
        p.fail(kwt, kwt.text + " is not valid in a fields block");
      }
      continue;
    }
    if (p.at_let()) {
      p.let_binding();
      continue;
    }
    if (set.variables.empty()) p.fail(p.peek(), "fields needs vars: before definitions", {"vars"});
    const Token lhs = p.expect_ident("field name");
    if (std::find(set.names.begin(), set.names.end(), lhs.text) != set.names.end())
      p.fail(lhs, "second definition of " + lhs.text, {}, ErrorCode::DuplicateEquation);
    if (p.scope.names.count(lhs.text)) p.fail(lhs, lhs.text + " is already declared");
    p.expect(Tok::Assign);
    const Token open = p.peek();
    p.expect(Tok::LParen);
    std::vector<Expr> comps{p.expr()};
    while (p.accept(Tok::Comma)) comps.push_back(p.expr());
    p.expect(Tok::RParen);
    p.expect(Tok::Semi);
    if (comps.size() != set.variables.size())
      p.fail(open, lhs.text + " has " + std::to_string(comps.size()) + " components for " +
                       std::to_string(set.variables.size()) + " variables");
    set.names.push_back(lhs.text);
    set.components.push_back(std::move(comps));
  }
  const Token close = p.take();
  p.finish();
  if (set.names.empty()) p.fail(close, "fields block defines no fields", {"field"});
  return set;
}

Solution parse_solution(std::string_view text) {
  Parser p(text);
  auto [kw, name] = p.header({"solution"});
  Solution sol;
  sol.name = name;
  bool vars_set = false;
  auto install_vars = [&] {
    if (vars_set) return;
    vars_set = true;
    if (sol.independents.empty()) sol.independents = {"x"};
    for (const auto& v : sol.independents) p.scope.names.emplace(v, Expr::symbol(v));
  };
  std::array<bool, 2> defined{false, false};
  while (p.peek().kind != Tok::RBrace) {
    if (p.peek().kind == Tok::End) p.fail(p.peek(), "unterminated block", {"'}'"});
    if (p.at_decl()) {
      const Token kwt = p.take();
      p.take();
      if (kwt.text == "vars") {
        if (vars_set) p.fail(kwt, "vars must come first and only once");
        auto ts = p.ident_list("variable name");
        if (ts.size() != 3 && ts.size() != 4) p.fail(kwt, "vars needs one or two independents and two dependents");
        auto names = names_of(ts);
        const std::size_t n = names.size() - 2;
        sol.independents.assign(names.begin(), names.begin() + static_cast<long>(n));
        sol.dependents = {names[n], names[n + 1]};
      } else if (kwt.text == "params" || kwt.text == "const") {
        install_vars();
        auto ps = p.param_list();
        sol.params.insert(sol.params.end(), ps.begin(), ps.end());
      } else if (kwt.text == "complex") {
        install_vars();
        if (defined[0] || defined[1]) p.fail(kwt, "complex: replaces both dependents", {}, ErrorCode::DuplicateEquation);
        const ComplexPair u = split(p.expr());
        p.expect(Tok::Semi);
        sol.values = {normalize(u.re), normalize(u.im)};
        defined = {true, true};
      } else {
        p.fail(kwt, kwt.text + " is not valid in a solution block");
      }
      continue;
    }
    install_vars();
    if (p.at_let()) {
      p.let_binding();
      continue;
    }
    const Token lhs = p.expect_ident("dependent variable");
    auto it = std::find(sol.dependents.begin(), sol.dependents.end(), lhs.text);
    if (it == sol.dependents.end()) p.fail(lhs, lhs.text + " is not a dependent variable", {sol.dependents[0], sol.dependents[1]}, ErrorCode::WrongLeftSide);
    const auto k = static_cast<std::size_t>(it - sol.dependents.begin());
    if (defined[k]) p.fail(lhs, "second definition of " + lhs.text, {}, ErrorCode::DuplicateEquation);
    p.expect(Tok::Assign);
    sol.values[k] = p.expr();
    p.expect(Tok::Semi);
    defined[k] = true;
  }
  const Token close = p.take();
  p.finish();
  for (std::size_t k = 0; k < 2; ++k)
    if (!defined[k]) p.fail(close, "missing definition for " + sol.dependents[k], {sol.dependents[k]});
  return sol;
}

Expr parse_expression(std::string_view text) {
  Parser p(text);
  p.scope.open = true;
  Expr e = p.expr();
  p.finish();
  return e;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
  return s;
}

void print_params(std::ostringstream& os, const std::vector<Parameter>& params) {
  if (params.empty()) return;
  std::vector<std::string> items;
  for (const auto& p : params) items.push_back(p.value ? p.name + " = " + to_string(*p.value) : p.name);
  os << "  params: " << join(items) << ";\n";
}

std::string block_name(const std::string& kw, const std::string& name) {
  return name.empty() ? kw + " {\n" : kw + " " + name + " {\n";
}

}  // namespace

std::string print_system(const SystemSpec& sys) {
  std::ostringstream os;
  os << block_name(std::string(to_string(sys.kind)), sys.name);
  if (!is_ode(sys.kind) && (sys.aux[0] != "h" || sys.aux[1] != "l")) os << "  aux: " << sys.aux[0] << ", " << sys.aux[1] << ";\n";
  std::vector<std::string> vars = sys.independents;
  vars.insert(vars.end(), sys.dependents.begin(), sys.dependents.end());
  os << "  vars: " << join(vars) << ";\n";
  print_params(os, sys.params);
  if (!sys.functions.empty()) {
    std::vector<std::string> items;
    for (const auto& d : sys.functions) {
      std::vector<std::string> args;
      for (std::size_t k = 0; k < d.formals.size(); ++k) {
        const Expr& a = d.arguments[k];
        const bool plain = a.is_symbol() && a.name() == d.formals[k];
        args.push_back(plain ? d.formals[k] : d.formals[k] + " = " + to_string(a));
      }
      items.push_back(d.name + "(" + join(args) + ")");
    }
    os << "  func: " << join(items) << ";\n";
    for (const auto& a : sys.analytic) os << "  analytic: " << a[0] << ", " << a[1] << ";\n";
  }
  for (const auto& e : sys.equations) os << "  " << to_string(e.lhs) << " = " << to_string(e.rhs) << ";\n";
  for (const auto& e : sys.constraints) os << "  " << to_string(e.lhs) << " = " << to_string(e.rhs) << ";\n";
  os << "}\n";
  return os.str();
}

std::string print_transformation(const PointTransformation& map) {
  std::ostringstream os;
  os << block_name("map", map.name);
  os << "  from: " << join(map.source) << ";\n";
  os << "  to: " << join(map.target) << ";\n";
  print_params(os, map.params);
  for (std::size_t k = 0; k < map.target.size(); ++k)
    os << "  " << map.target[k] << " = " << to_string(map.components[k]) << ";\n";
  os << "}\n";
  return os.str();
}

std::string print_solution(const Solution& sol) {
  std::ostringstream os;
  os << block_name("solution", sol.name);
  std::vector<std::string> vars = sol.independents;
  vars.insert(vars.end(), sol.dependents.begin(), sol.dependents.end());
  os << "  vars: " << join(vars) << ";\n";
  print_params(os, sol.params);
  for (std::size_t k = 0; k < 2; ++k) os << "  " << sol.dependents[k] << " = " << to_string(sol.values[k]) << ";\n";
  os << "}\n";
  return os.str();
}

std::string print_field_set(const FieldSet& set) {
  std::ostringstream os;
  os << block_name("fields", set.name);
  os << "  vars: " << join(set.variables) << ";\n";
  print_params(os, set.params);
  for (std::size_t k = 0; k < set.names.size(); ++k) {
    std::vector<std::string> parts;
    for (const auto& c : set.components[k]) parts.push_back(to_string(c));
    os << "  " << set.names[k] << " = (" << join(parts) << ");\n";
  }
  os << "}\n";
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace clin
