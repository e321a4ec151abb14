#pragma once

// First-order differential operators and the hypotheses of the
// four-generator linearization theorem.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "clin/eqdsl.hpp"
#include "clin/symexpr.hpp"

namespace clin {

/// sum_k components[k] * d/d variables[k]
struct VectorField {
  std::vector<std::string> variables;
  std::vector<Expr> components;

  VectorField() = default;
  VectorField(std::vector<std::string> vars, std::vector<Expr> comps);

  /// The field applied to a function.
  Expr apply(const Expr& e) const;
  bool is_zero() const;

  friend bool operator==(const VectorField&, const VectorField&) = default;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& s, const VectorField& v);

/// Component k of [V, W] is sum_j (V_j d_j W_k - W_j d_j V_k).
VectorField lie_bracket(const VectorField& v, const VectorField& w);

std::string to_string(const VectorField& v);

/// The named fields of a parsed set with param values substituted.
std::vector<VectorField> fields_of(const FieldSet& set);
VectorField field_named(const FieldSet& set, const std::string& name);

/// Componentwise zero test; Zero only when every component is.
ZeroVerdict is_zero_field(const VectorField& v, const ZeroTestOptions& options = {});

enum class Proportionality { Found, Inconsistent, Degenerate };

std::string_view to_string(Proportionality p);

struct Theorem2Report {
  Proportionality proportionality = Proportionality::Degenerate;
  std::string solved_from;  // variable whose components fixed rho
  Expr rho1, rho2;
  bool nonconstant = false;
  std::vector<std::string> inconsistent;  // e.g. "X1.f"
  std::array<VectorField, 2> commutators;  // [X1,X2]-[Y1,Y2], [X1,Y2]+[Y1,X2]
  std::array<ZeroVerdict, 2> commutator_verdicts;
  bool overall = false;
};

/// Tries X1 = r1 X2 - r2 Y2, Y1 = r1 Y2 + r2 X2 componentwise, then tests
/// both commutator combinations.
Theorem2Report check_theorem2(const VectorField& x1, const VectorField& y1, const VectorField& x2,
                              const VectorField& y2, const ZeroTestOptions& options = {});

}  // namespace clin
