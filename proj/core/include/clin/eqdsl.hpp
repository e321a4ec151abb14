#pragma once

// Text formats for equation systems (.eqs), point transformations (.map) and
// closed-form solutions (.sol).
//
//   ode2 emden {
//     vars: x, f, g;
//     f'' = -3*f*f' + 3*g*g' - f^3 + 3*f*g^2;
//     g'' = -3*g*f' - 3*f*g' - 3*f^2*g + g^3;
//   }
//
// Blocks: ode1 | ode2 | pde1 | pde2 | map | solution | fields. Declarations:
//   vars: independents..., dependent1, dependent2;   (map: from: ...; to: ...;)
//   params: a, b = 1/2;        (const: is a synonym)
//   func: w1(x), w2(p = 2*f - x^2, q = 2*g);
//   analytic: w1, w2;          (w1 + i w2 analytic in p + i q)
//   let s = f^2 + g^2;
//   aux: H, L;                 (pde2 only; renames h, l)
//   complex: (x + %i*y)^2;     (solution only; defines both dependents
//                               as real and imaginary parts)

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clin/expr.hpp"
#include "clin/symexpr.hpp"

namespace clin {

enum class SystemKind { ODE1, ODE2, PDE1, PDE2 };

std::string_view to_string(SystemKind kind);
bool is_ode(SystemKind kind);
int order(SystemKind kind);

struct Parameter {
  std::string name;
  std::optional<Expr> value;

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

/// An arbitrary function of its formal arguments, each bound to an
/// expression over the system variables. Its partials are the symbols
/// `name_<formals>` with formals in declaration order.
struct FunctionDecl {
  std::string name;
  std::vector<std::string> formals;
  std::vector<Expr> arguments;

  friend bool operator==(const FunctionDecl&, const FunctionDecl&) = default;
};

struct Equation {
  Expr lhs;
  Expr rhs;

  friend bool operator==(const Equation&, const Equation&) = default;
};

struct SystemSpec {
  SystemKind kind = SystemKind::ODE2;
  std::string name;
  std::vector<std::string> independents;
  std::array<std::string, 2> dependents{"f", "g"};
  std::vector<Parameter> params;
  std::vector<FunctionDecl> functions;
  /// Pairs (w1, w2) with w1 + i w2 analytic in (first formal) + i (second
  /// formal); their partials are kept in Cauchy-Riemann normal form.
  std::vector<std::array<std::string, 2>> analytic;
  std::array<std::string, 2> aux{"h", "l"};
  bool uses_aux = false;
  std::vector<Equation> equations;    // the two principal equations, as written
  std::vector<Equation> constraints;  // first-order side conditions (pde2)

  /// Every derivative symbol the kind admits, lowest order first.
  std::vector<std::string> derivative_symbols() const;
  /// f', g' (ode) or f_x, f_y, g_x, g_y (pde).
  std::vector<std::string> first_derivatives() const;
  /// f'', g'' or f_xx, f_xy, f_yy, g_xx, g_xy, g_yy.
  std::vector<std::string> second_derivatives() const;
  /// Chain rule for declared functions.
  PartialRule partial_rule() const;
  /// Values of the params that carry one.
  Bindings bindings() const;
  /// h = (f_x + g_y)/2, l = (g_x - f_y)/2 under the current aux names.
  Bindings aux_definitions() const;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Target roles are inferred from arity: three targets are (independent,
/// dependent1, dependent2); four targets from a three-variable source are
/// (chi_re, chi_im, U_re, U_im), a complex independent over real x; four
/// targets from a four-variable source are (X, Y, F, G).
struct PointTransformation {
  std::string name;
  std::vector<std::string> source;
  std::vector<std::string> target;
  std::vector<Parameter> params;
  std::vector<Expr> components;  // one per target, over source symbols

  Bindings bindings() const;

  friend bool operator==(const PointTransformation&, const PointTransformation&) = default;
};

struct Solution {
  std::string name;
  std::vector<std::string> independents;
  std::array<std::string, 2> dependents{"f", "g"};
  std::vector<Parameter> params;
  std::array<Expr, 2> values;

  Bindings bindings() const;

  friend bool operator==(const Solution&, const Solution&) = default;
};

/// Named first-order operators over one variable list, components in
/// variable order:
///   fields scaling { vars: x, y, f, g; X2 = (x, y, -f, -g); }
struct FieldSet {
  std::string name;
  std::vector<std::string> variables;
  std::vector<Parameter> params;
  std::vector<std::string> names;
  std::vector<std::vector<Expr>> components;

  Bindings bindings() const;

  friend bool operator==(const FieldSet&, const FieldSet&) = default;
};

SystemSpec parse_system(std::string_view text);
PointTransformation parse_transformation(std::string_view text);
Solution parse_solution(std::string_view text);
FieldSet parse_field_set(std::string_view text);

/// A bare expression where every identifier is a symbol.
Expr parse_expression(std::string_view text);

std::string print_system(const SystemSpec& sys);
std::string print_transformation(const PointTransformation& map);
std::string print_solution(const Solution& sol);
std::string print_field_set(const FieldSet& set);

/// Canonical derivative symbol, e.g. ("f", {"y","x"}) -> "f_xy" for pde
/// independents (x, y), ("f", {"x","x"}) -> "f''" for an ode.
std::string derivative_symbol(const std::string& dependent, std::vector<std::string> wrt,
                              const std::vector<std::string>& independents, bool ode);

/// The symbols principal equations are linear in: f'', g'' (ode2), f', g'
/// (ode1), or for pde2 two placeholders standing for the canonical
/// combinations f_xx - f_yy + 2g_xy and g_xx - g_yy - 2f_xy.
std::array<std::string, 2> principal_unknowns(const SystemSpec& sys);

/// lhs - rhs of a principal equation written over principal_unknowns.
Expr principal_residual(const SystemSpec& sys, const Equation& eq);

std::string read_text_file(const std::string& path);

}  // namespace clin
