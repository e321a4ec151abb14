#include "clin/lincheck.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>

#include "clin/error.hpp"
#include "conditions_text.hpp"

namespace clin {

namespace {

enum Coef { kA1, kA2, kB1, kB2, kC1, kC2, kD1, kD2 };

const char* const kCoefNames[8] = {"A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2"};

struct PatternTerm {
  int coef;
  int factor;
};

// Expected coefficient of p^a q^b (p, q the two slopes) in one equation of
// the realified cubic form, as a combination of the eight coefficients.
using PatternRow = std::map<std::pair<int, int>, PatternTerm>;

const std::array<PatternRow, 2>& pattern() {
  static const std::array<PatternRow, 2> rows{
      PatternRow{
          {{3, 0}, {kA1, 1}},
          {{1, 2}, {kA1, -3}},
          {{2, 1}, {kA2, -3}},
          {{0, 3}, {kA2, 1}},
          {{2, 0}, {kB1, 1}},
          {{0, 2}, {kB1, -1}},
          {{1, 1}, {kB2, -2}},
          {{1, 0}, {kC1, 1}},
          {{0, 1}, {kC2, -1}},
          {{0, 0}, {kD1, 1}},
      },
      PatternRow{
          {{2, 1}, {kA1, 3}},
          {{0, 3}, {kA1, -1}},
          {{3, 0}, {kA2, 1}},
          {{1, 2}, {kA2, -3}},
          {{1, 1}, {kB1, 2}},
          {{2, 0}, {kB2, 1}},
          {{0, 2}, {kB2, -1}},
          {{1, 0}, {kC2, 1}},
          {{0, 1}, {kC1, 1}},
          {{0, 0}, {kD2, 1}},
      },
  };
  return rows;
}

// The monomial each coefficient is read off.
constexpr std::array<std::pair<int, std::pair<int, int>>, 8> kDefining{{
    {0, {3, 0}},
    {1, {3, 0}},
    {0, {2, 0}},
    {1, {2, 0}},
    {0, {1, 0}},
    {1, {1, 0}},
    {0, {0, 0}},
    {1, {0, 0}},
}};

bool mentions_any(const Expr& e, const std::vector<std::string>& names) {
  return std::any_of(names.begin(), names.end(), [&](const std::string& s) { return depends_on(e, s); });
}

std::array<Expr, 8> read_pattern(const std::array<Expr, 2>& rhs, const std::array<std::string, 2>& slopes,
                                 const Rational& scale, const std::vector<std::string>& forbidden,
                                 const ZeroTestOptions& options) {
  const std::vector<std::string> in(slopes.begin(), slopes.end());
  std::array<PolynomialCoefficients, 2> poly;
  for (int k = 0; k < 2; ++k) {
    try {
      poly[k] = collect_polynomial(rhs[k], in, 3);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotPolynomial)
        throw Error(ErrorCode::PatternMismatch, "equation " + std::to_string(k + 1) + " is not polynomial in " +
                                                    slopes[0] + ", " + slopes[1] + ": " + e.what());
      throw;
    }
  }
  auto coeff = [&](int eq, std::pair<int, int> m) {
    auto it = poly[eq].find(Monomial{m.first, m.second});
    if (it == poly[eq].end()) return Expr(0);
    const Expr v = normalize(Expr(scale) * it->second);
    if (scale == 1) return v;
    try {
      return expand(v, 2000);
    } catch (const Error&) {
      return v;
    }
  };
  std::array<Expr, 8> c;
  for (int i = 0; i < 8; ++i) c[i] = coeff(kDefining[i].first, kDefining[i].second);

  for (int eq = 0; eq < 2; ++eq) {
    for (const auto& [mono, term] : pattern()[eq]) {
      const Expr expected = Expr(term.factor) * c[term.coef];
      const Expr found = coeff(eq, mono);
      if (expected == found) continue;
      const ZeroVerdict v = is_identically_zero(expected - found, {}, options);
      if (!v.is_zero())
        throw Error(ErrorCode::PatternMismatch,
                    "coefficient of " + monomial_to_string({mono.first, mono.second}, in) + " in equation " +
                        std::to_string(eq + 1) + ": expected " + to_string(expected) + ", found " + to_string(found));
    }
    for (const auto& [mono, value] : poly[eq]) {
      if (total_degree(mono) > 3) continue;  // collect_polynomial already rejects these
      if (!pattern()[eq].count({mono[0], mono[1]}))
        throw Error(ErrorCode::PatternMismatch, "unexpected monomial " + monomial_to_string(mono, in));
    }
  }
  for (int i = 0; i < 8; ++i)
    if (mentions_any(c[i], forbidden))
      throw Error(ErrorCode::PatternMismatch, std::string("coefficient ") + kCoefNames[i] + " depends on derivatives");
  return c;
}

// First-order partials left in a pde right side are rewritten through the
// Cauchy-Riemann constraints: f_x = g_y = h, g_x = -f_y = l.
Expr rewrite_first_order(const SystemSpec& sys, const Expr& e) {
  const auto first = sys.first_derivatives();  // f_x, f_y, g_x, g_y
  if (!mentions_any(e, first)) return e;
  if (sys.constraints.empty())
    throw Error(ErrorCode::PatternMismatch,
                "right side has first-order partials but the system declares no Cauchy-Riemann constraints");
  const Expr h = Expr::symbol(sys.aux[0]);
  const Expr l = Expr::symbol(sys.aux[1]);
  Bindings b;
  b.emplace(first[0], h);
  b.emplace(first[3], h);
  b.emplace(first[2], l);
  b.emplace(first[1], -l);
  return normalize(substitute(e, b));
}

std::vector<std::string> index_letters(bool pde) {
  return pde ? std::vector<std::string>{"x", "y", "f", "g"} : std::vector<std::string>{"x", "f", "g"};
}

int letter_rank(char c) {
  switch (c) {
    case 'x': return 0;
    case 'y': return 1;
    case 'f': return 2;
    case 'g': return 3;
  }
  return 4;
}

std::string sorted_letters(std::string s) {
  std::sort(s.begin(), s.end(), [](char a, char b) { return letter_rank(a) < letter_rank(b); });
  return s;
}

struct Placeholder {
  int coef;
  std::string letters;
};

std::optional<Placeholder> parse_placeholder(const std::string& name) {
  static const std::regex re("^([ABCD])([12])(?:_([xyfg]+))?$");
  std::smatch m;
  if (!std::regex_match(name, m, re)) return std::nullopt;
  const int base = (m[1].str()[0] - 'A') * 2 + (m[2].str()[0] - '1');
  return Placeholder{base, m[3].matched ? m[3].str() : std::string()};
}

PartialRule placeholder_rule(bool pde) {
  const auto letters = index_letters(pde);
  return [letters](const std::string& symbol, const std::string& wrt) -> std::optional<Expr> {
    auto p = parse_placeholder(symbol);
    if (!p) return std::nullopt;
    if (std::find(letters.begin(), letters.end(), wrt) == letters.end()) return std::nullopt;
    const std::string s = sorted_letters(p->letters + wrt);
    return Expr::symbol(std::string(kCoefNames[p->coef]) + "_" + s);
  };
}

struct LieInput {
  ComplexPair A, B, C, D;
  bool pde;
  std::string x, y, f, g;
  PartialRule rule;
};

std::array<ComplexPair, 2> lie_residuals(const LieInput& in) {
  auto dz = [&](const ComplexPair& w) {
    if (in.pde) return d_z(w, in.x, in.y, in.rule);
    return partial(w, in.x, in.rule);
  };
  auto du = [&](const ComplexPair& w) { return d_u(w, in.f, in.g, in.rule); };
  const auto& A = in.A;
  const auto& B = in.B;
  const auto& C = in.C;
  const auto& D = in.D;
  const ComplexPair Az = dz(A), Au = du(A);
  const ComplexPair Bz = dz(B), Bu = du(B);
  const ComplexPair Cz = dz(C), Cu = du(C);
  const ComplexPair Dz = dz(D), Du = du(D);
  const ComplexPair Azz = dz(Az);
  const ComplexPair Cuu = du(Cu);
  const ComplexPair Bzu = du(Bz);
  const ComplexPair Bzz = dz(Bz);
  const ComplexPair Czu = du(Cz);
  const ComplexPair Duu = du(Du);
  const ComplexPair l1 = Rational(3) * Azz + Rational(3) * (Az * C) + Rational(3) * (A * Cz) -
                         Rational(3) * (Au * D) + Cuu - Rational(6) * (A * Du) + B * Cu -
                         Rational(2) * (B * Bz) - Rational(2) * Bzu;
  const ComplexPair l2 = Rational(6) * (Az * D) - Rational(3) * (Bu * D) + Rational(3) * (A * Dz) + Bzz -
                         Rational(2) * Czu - Rational(3) * (B * Du) + Rational(3) * Duu +
                         Rational(2) * (C * Cu) - C * Bz;
  return {normalize(l1), normalize(l2)};
}

LieInput lie_input(const CubicCoefficients& c) {
  LieInput in{c.A(), c.B(), c.C(), c.D(), c.pde, "", "", c.dependents[0], c.dependents[1], c.rule};
  in.x = c.independents.at(0);
  if (c.pde) in.y = c.independents.at(1);
  return in;
}

ConditionReport run_conditions(std::vector<std::pair<std::string, Expr>> residuals, const ZeroTestOptions& options) {
  ConditionReport report;
  for (auto& [name, r] : residuals) {
    ConditionResult res{name, r, is_identically_zero(r, {}, options)};
    report.conditions.push_back(std::move(res));
  }
  report.overall = combine(report.conditions);
  return report;
}

ConditionReport printed_conditions(const CubicCoefficients& c, const ZeroTestOptions& options) {
  const auto templates = printed_condition_templates(c.pde);
  std::vector<std::pair<std::string, Expr>> residuals;
  for (int k = 0; k < 4; ++k)
    residuals.emplace_back("printed." + std::to_string(k + 1), normalize(instantiate(templates[k], c)));
  return run_conditions(std::move(residuals), options);
}

}  // namespace

CubicCoefficients make_coefficients(bool pde, const std::array<Expr, 8>& values, std::vector<std::string> independents,
                                    std::array<std::string, 2> dependents) {
  CubicCoefficients c;
  c.pde = pde;
  c.independents = independents.empty() ? (pde ? std::vector<std::string>{"x", "y"} : std::vector<std::string>{"x"})
                                         : std::move(independents);
  c.dependents = std::move(dependents);
  c.A1 = values[0];
  c.A2 = values[1];
  c.B1 = values[2];
  c.B2 = values[3];
  c.C1 = values[4];
  c.C2 = values[5];
  c.D1 = values[6];
  c.D2 = values[7];
  c.slopes = pde ? std::array<std::string, 2>{"h", "l"}
                 : std::array<std::string, 2>{c.dependents[0] + "'", c.dependents[1] + "'"};
  return c;
}

std::array<Expr, 2> solve_principal(const SystemSpec& sys, const ZeroTestOptions& options) {
  if (sys.equations.size() != 2) throw Error(ErrorCode::InvalidArgument, "system needs two principal equations");
  const auto u = principal_unknowns(sys);
  const std::vector<std::string> in(u.begin(), u.end());
  const Bindings params = sys.bindings();

  Expr a[2][2];
  Expr c[2];
  for (int k = 0; k < 2; ++k) {
    const Expr r = substitute(principal_residual(sys, sys.equations[k]), params);
    PolynomialCoefficients p;
    try {
      p = collect_polynomial(r, in, 1);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotPolynomial || e.code() == ErrorCode::DegreeTooHigh)
        throw Error(ErrorCode::NotSolvableForSecondDerivatives,
                    "equation " + std::to_string(k + 1) + " is not linear in " + u[0] + ", " + u[1]);
      throw;
    }
    auto get = [&](Monomial m) {
      auto it = p.find(m);
      return it == p.end() ? Expr(0) : it->second;
    };
    a[k][0] = get({1, 0});
    a[k][1] = get({0, 1});
    c[k] = get({0, 0});
  }
  // a[k][0] u0 + a[k][1] u1 + c[k] = 0
  if (a[0][1].is_zero() && a[1][0].is_zero() && !a[0][0].is_zero() && !a[1][1].is_zero())
    return {normalize(-c[0] / a[0][0]), normalize(-c[1] / a[1][1])};
  if (a[0][0].is_zero() && a[1][1].is_zero() && !a[0][1].is_zero() && !a[1][0].is_zero())
    return {normalize(-c[1] / a[1][0]), normalize(-c[0] / a[0][1])};
  const Expr det = normalize(a[0][0] * a[1][1] - a[0][1] * a[1][0]);
  if (det.is_zero() || is_identically_zero(det, {}, options).is_zero())
    throw Error(ErrorCode::NotSolvableForSecondDerivatives,
                "the equations do not determine " + u[0] + " and " + u[1] + " (determinant " + to_string(det) + ")");
  const Expr u0 = (a[0][1] * c[1] - a[1][1] * c[0]) / det;
  const Expr u1 = (a[1][0] * c[0] - a[0][0] * c[1]) / det;
  return {normalize(u0), normalize(u1)};
}

CubicCoefficients extract_ode_coeffs(const SystemSpec& sys, const ZeroTestOptions& options) {
  if (sys.kind != SystemKind::ODE2) throw Error(ErrorCode::InvalidArgument, "expected an ode2 system");
  const auto rhs = solve_principal(sys, options);
  CubicCoefficients c = make_coefficients(false, {}, sys.independents, sys.dependents);
  const auto values = read_pattern(rhs, c.slopes, Rational(1), sys.derivative_symbols(), options);
  c = make_coefficients(false, values, sys.independents, sys.dependents);
  c.rule = sys.partial_rule();
  return c;
}

CubicCoefficients extract_pde_coeffs(const SystemSpec& sys, const ZeroTestOptions& options) {
  if (sys.kind != SystemKind::PDE2) throw Error(ErrorCode::InvalidArgument, "expected a pde2 system");
  auto rhs = solve_principal(sys, options);
  for (auto& r : rhs) r = rewrite_first_order(sys, r);
  auto forbidden = sys.derivative_symbols();
  const std::array<std::string, 2> slopes = sys.aux;
  const auto values = read_pattern(rhs, slopes, Rational(1, 4), forbidden, options);
  CubicCoefficients c = make_coefficients(true, values, sys.independents, sys.dependents);
  c.slopes = slopes;
  c.rule = sys.partial_rule();
  return c;
}

CubicCoefficients extract_coeffs(const SystemSpec& sys, const ZeroTestOptions& options) {
  switch (sys.kind) {
    case SystemKind::ODE2: return extract_ode_coeffs(sys, options);
    case SystemKind::PDE2: return extract_pde_coeffs(sys, options);
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("no cubic form for ") + std::string(to_string(sys.kind)) + " systems");
}

std::array<Expr, 2> cubic_form(const CubicCoefficients& c) {
  const auto v = c.all();
  const Expr p = Expr::symbol(c.slopes[0]);
  const Expr q = Expr::symbol(c.slopes[1]);
  const Expr scale(c.pde ? 4 : 1);
  std::array<Expr, 2> out;
  for (int eq = 0; eq < 2; ++eq) {
    std::vector<Expr> terms;
    for (const auto& [mono, term] : pattern()[eq])
      terms.push_back(Expr(term.factor) * v[term.coef] * pow(p, Expr(mono.first)) * pow(q, Expr(mono.second)));
    out[eq] = normalize(scale * add(std::move(terms)));
  }
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Linearizable: return "linearizable";
    case Verdict::NotLinearizable: return "not-linearizable";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

Verdict combine(const std::vector<ConditionResult>& results) {
  bool all_zero = true;
  for (const auto& r : results) {
    if (r.verdict.is_nonzero()) return Verdict::NotLinearizable;
    if (!r.verdict.is_zero()) all_zero = false;
  }
  return all_zero ? Verdict::Linearizable : Verdict::Indeterminate;
}

ConditionReport check_scalar_lie(const CubicCoefficients& c, const ZeroTestOptions& options) {
  const auto l = lie_residuals(lie_input(c));
  return run_conditions({{"lie.1.re", l[0].re}, {"lie.1.im", l[0].im}, {"lie.2.re", l[1].re}, {"lie.2.im", l[1].im}},
                        options);
}

ConditionReport check_ode_conditions(const CubicCoefficients& c, const ZeroTestOptions& options) {
  if (c.pde) throw Error(ErrorCode::InvalidArgument, "ode conditions need ode coefficients");
  return printed_conditions(c, options);
}

ConditionReport check_pde_conditions(const CubicCoefficients& c, const ZeroTestOptions& options) {
  if (!c.pde) throw Error(ErrorCode::InvalidArgument, "pde conditions need pde coefficients");
  return printed_conditions(c, options);
}

std::array<Expr, 4> printed_condition_templates(bool pde) {
  const auto& text = pde ? detail::kPrintedPde : detail::kPrintedOde;
  std::array<Expr, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = parse_expression(text[k]);
  return out;
}

std::array<Expr, 4> derived_condition_templates(bool pde) {
  auto sym = [](int i) { return Expr::symbol(kCoefNames[i]); };
  LieInput in{{sym(kA1), sym(kA2)}, {sym(kB1), sym(kB2)}, {sym(kC1), sym(kC2)}, {sym(kD1), sym(kD2)},
              pde, "x", pde ? "y" : "", "f", "g", placeholder_rule(pde)};
  const auto l = lie_residuals(in);
  return {expand(l[0].re), expand(l[0].im), expand(l[1].re), expand(l[1].im)};
}

Expr instantiate(const Expr& tmpl, const CubicCoefficients& c) {
  const auto values = c.all();
  auto variable = [&](char letter) -> const std::string& {
    switch (letter) {
      case 'x': return c.independents.at(0);
      case 'y':
        if (!c.pde) throw Error(ErrorCode::InvalidArgument, "index y in an ode template");
        return c.independents.at(1);
      case 'f': return c.dependents[0];
      default: return c.dependents[1];
    }
  };
  Bindings b;
  for (const auto& name : free_symbols(tmpl)) {
    auto p = parse_placeholder(name);
    if (!p) continue;
    std::vector<std::string> wrt;
    for (char ch : p->letters) wrt.push_back(variable(ch));
    b.emplace(name, differentiate(values[p->coef], std::span<const std::string>(wrt), c.rule));
  }
  return substitute(tmpl, b);
}

bool DiscrepancyReport::all_agree() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionComparison& c) { return c.agrees(); });
}

namespace {

// Expanded polynomial over placeholder symbols as term string -> rational.
std::map<std::string, Rational> term_map(const Expr& e) {
  std::map<std::string, Rational> out;
  const Expr x = expand(e);
  auto add_term = [&](const Expr& t) {
    Rational coef(1);
    std::vector<Expr> rest;
    if (t.kind() == NodeKind::Product) {
      for (const auto& f : t.operands()) {
        if (f.is_constant())
          coef *= f.value();
        else
          rest.push_back(f);
      }
    } else if (t.is_constant()) {
      coef = t.value();
    } else {
      rest.push_back(t);
    }
    const std::string key = rest.empty() ? "1" : to_string(mul(std::move(rest)));
    out[key] += coef;
  };
  if (x.kind() == NodeKind::Sum) {
    for (const auto& t : x.operands()) add_term(t);
  } else if (!x.is_zero()) {
    add_term(x);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace

DiscrepancyReport derive_real_conditions(bool pde, int instances, std::uint64_t seed) {
  DiscrepancyReport report;
  report.pde = pde;
  const auto printed = printed_condition_templates(pde);
  const auto derived = derived_condition_templates(pde);
  SampleRng rng(seed);
  for (int k = 0; k < 4; ++k) {
    ConditionComparison& cmp = report.conditions[k];
    cmp.name = "printed." + std::to_string(k + 1);
    const auto p = term_map(printed[k]);
    const auto d = term_map(derived[k]);

    std::map<Rational, int> votes;
    for (const auto& [term, pv] : p) {
      auto it = d.find(term);
      if (it != d.end()) ++votes[Rational(pv / it->second)];
    }
    cmp.scale = Rational(1);
    int best = 0;
    for (const auto& [ratio, n] : votes)
      if (n > best) {
        best = n;
        cmp.scale = ratio;
      }

    std::set<std::string> terms;
    for (const auto& [t, v] : p) terms.insert(t);
    for (const auto& [t, v] : d) terms.insert(t);
    for (const auto& t : terms) {
      const Rational pv = p.count(t) ? p.at(t) : Rational(0);
      const Rational dv = d.count(t) ? Rational(cmp.scale * d.at(t)) : Rational(0);
      if (pv != dv) cmp.discrepancies.push_back({t, pv, dv});
    }

    const Expr diff = printed[k] - Expr(cmp.scale) * derived[k];
    std::set<std::string> symbols = free_symbols(diff);
    cmp.instances = instances;
    for (int n = 0; n < instances; ++n) {
      Bindings b;
      for (const auto& s : symbols) {
        const long num = static_cast<long>(rng.next() % 19) - 9;
        const long den = static_cast<long>(rng.next() % 5) + 1;
        Rational q(num, den);
        q.canonicalize();
        b.emplace(s, Expr(q));
      }
      const Expr v = normalize(substitute(diff, b));
      if (v.is_zero()) ++cmp.instances_agreeing;
    }
  }
  return report;
}

}  // namespace clin
