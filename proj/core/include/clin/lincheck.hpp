#pragma once

// Cubic-semilinear coefficient extraction and the linearizability conditions.

#include <array>
#include <string>
#include <vector>

#include "clin/complexify.hpp"
#include "clin/eqdsl.hpp"
#include "clin/symexpr.hpp"

namespace clin {

/// The eight real coefficient functions. For a pde the h, l monomial
/// coefficients are divided by the conventional factor 4.
struct CubicCoefficients {
  bool pde = false;
  std::vector<std::string> independents{"x"};
  std::array<std::string, 2> dependents{"f", "g"};
  Expr A1, A2, B1, B2, C1, C2, D1, D2;
  PartialRule rule;

  ComplexPair A() const { return {A1, A2}; }
  ComplexPair B() const { return {B1, B2}; }
  ComplexPair C() const { return {C1, C2}; }
  ComplexPair D() const { return {D1, D2}; }
  /// Coefficients in the order A1, A2, B1, B2, C1, C2, D1, D2.
  std::array<Expr, 8> all() const { return {A1, A2, B1, B2, C1, C2, D1, D2}; }
  /// The two first-derivative symbols the pattern is written in (f', g' or h, l).
  std::array<std::string, 2> slopes;
};

CubicCoefficients make_coefficients(bool pde, const std::array<Expr, 8>& values,
                                    std::vector<std::string> independents = {},
                                    std::array<std::string, 2> dependents = {"f", "g"});

/// Right sides with the principal derivatives isolated: (f'', g'') for ode2,
/// (f', g') for ode1, and the two canonical combinations for pde2. Param
/// values are substituted. Implicit forms are solved as a 2x2 linear system.
std::array<Expr, 2> solve_principal(const SystemSpec& sys, const ZeroTestOptions& options = {});

CubicCoefficients extract_ode_coeffs(const SystemSpec& sys, const ZeroTestOptions& options = {});
CubicCoefficients extract_pde_coeffs(const SystemSpec& sys, const ZeroTestOptions& options = {});
CubicCoefficients extract_coeffs(const SystemSpec& sys, const ZeroTestOptions& options = {});

/// The cubic right sides rebuilt from the coefficients (inverse of extraction).
std::array<Expr, 2> cubic_form(const CubicCoefficients& c);

enum class Verdict { Linearizable, NotLinearizable, Indeterminate };

std::string_view to_string(Verdict v);

struct ConditionResult {
  std::string name;
  Expr residual;
  ZeroVerdict verdict;
};

struct ConditionReport {
  std::vector<ConditionResult> conditions;
  Verdict overall = Verdict::Indeterminate;
};

Verdict combine(const std::vector<ConditionResult>& results);

/// The two complex Lie conditions, split into four real residuals.
ConditionReport check_scalar_lie(const CubicCoefficients& c, const ZeroTestOptions& options = {});

/// The printed real conditions, transcribed verbatim.
ConditionReport check_ode_conditions(const CubicCoefficients& c, const ZeroTestOptions& options = {});
ConditionReport check_pde_conditions(const CubicCoefficients& c, const ZeroTestOptions& options = {});

/// Templates over placeholder symbols A1, A1_x, C2_fg, ... (index letters
/// x, y, f, g in that order).
std::array<Expr, 4> printed_condition_templates(bool pde);
std::array<Expr, 4> derived_condition_templates(bool pde);

/// Replaces placeholders in a template by the coefficients and their partials.
Expr instantiate(const Expr& tmpl, const CubicCoefficients& c);

struct TermDiscrepancy {
  std::string term;
  Rational printed;
  Rational derived;  // already multiplied by the scale
};

struct ConditionComparison {
  std::string name;
  Rational scale;
  std::vector<TermDiscrepancy> discrepancies;
  int instances = 0;
  int instances_agreeing = 0;

  bool agrees() const { return discrepancies.empty() && instances_agreeing == instances; }
};

struct DiscrepancyReport {
  bool pde = false;
  std::array<ConditionComparison, 4> conditions;

  bool all_agree() const;
};

/// Splits the complex conditions over generic placeholders and compares
/// them with the printed set, one rational scale per condition.
DiscrepancyReport derive_real_conditions(bool pde, int instances = 50, std::uint64_t seed = 42);

}  // namespace clin
