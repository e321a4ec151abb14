#pragma once

// Calculus, numeric evaluation, zero-testing and polynomial collection on Expr.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "clin/expr.hpp"

namespace clin {

/// Hook for symbols that stand for functions (e.g. coefficient placeholders).
/// Returns the partial derivative of `symbol` with respect to `wrt`, or
/// nullopt to treat the symbol as a constant.
using PartialRule = std::function<std::optional<Expr>(const std::string& symbol, const std::string& wrt)>;

/// Exact partial derivative, normalized. All other symbols are constants
/// unless `rule` says otherwise.
Expr differentiate(const Expr& e, const std::string& wrt, const PartialRule& rule = {});

/// Repeated differentiation, applied left to right.
Expr differentiate(const Expr& e, std::span<const std::string> wrt, const PartialRule& rule = {});

using ComplexEnv = std::map<std::string, Complex, std::less<>>;

struct EvalTrace {
  Complex value;
  double max_magnitude = 0.0;  // over all intermediate node values
  double min_denominator = 0.0;  // smallest |base| of a negative power, ln argument, etc.
};

/// Expression compiled against a fixed symbol order. Evaluation is IEEE
/// double complex with principal branches; throws DomainError on ln(0),
/// division by zero, or any non-finite intermediate.
class Evaluator {
 public:
  Evaluator(const Expr& e, std::vector<std::string> symbols);

  Complex operator()(std::span<const Complex> values) const;
  EvalTrace trace(std::span<const Complex> values) const;
  double real(std::span<const double> values) const;

  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  struct Instr {
    NodeKind kind = NodeKind::Constant;
    Function fn = Function::Exp;
    Complex constant;
    int slot = -1;
    bool integer_exponent = false;
    long int_exponent = 0;
    std::vector<int> args;
  };

  EvalTrace run(std::span<const Complex> values, bool tracking) const;

  std::vector<std::string> symbols_;
  std::vector<Instr> program_;
};

Complex eval_complex(const Expr& e, const ComplexEnv& env);
EvalTrace eval_traced(const Expr& e, const ComplexEnv& env);

enum class SampleDomain { ComplexBox, RealBox };

struct ZeroTestOptions {
  int samples = 64;
  double tolerance = 1e-9;
  std::uint64_t seed = 42;
  SampleDomain domain = SampleDomain::ComplexBox;
  double box_half_width = 2.0;
};

struct ZeroVerdict {
  enum class Kind { Zero, NonZero, Unknown };
  Kind kind = Kind::Unknown;
  ComplexEnv witness;  // NonZero only
  Complex witness_value;
  double max_magnitude = 0.0;  // largest |value| among accepted samples
  int valid_samples = 0;
  bool exact = false;  // decided symbolically

  bool is_zero() const { return kind == Kind::Zero; }
  bool is_nonzero() const { return kind == Kind::NonZero; }
};

std::string_view to_string(ZeroVerdict::Kind kind);

/// Probabilistic identity test. Symbols sampled are `vars` plus every free
/// symbol of `e`; each coordinate is drawn from the sampling box. An exact
/// expansion fast path answers Zero when the expression cancels symbolically.
ZeroVerdict is_identically_zero(const Expr& e, std::span<const std::string> vars = {},
                                const ZeroTestOptions& options = {});

/// Exponent vector over the `in` symbols.
using Monomial = std::vector<int>;
using PolynomialCoefficients = std::map<Monomial, Expr>;

/// Rewrites `e` as a polynomial in `in` with coefficients free of those
/// symbols. Zero coefficients are dropped.
PolynomialCoefficients collect_polynomial(const Expr& e, std::span<const std::string> in, int max_degree);

std::string monomial_to_string(const Monomial& m, std::span<const std::string> in);
int total_degree(const Monomial& m);

/// Seeded generator shared by every sampling routine (mt19937_64, 53-bit
/// uniform doubles).
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed);
  double uniform(double lo, double hi);
  std::uint64_t next();

 private:
  std::mt19937_64 engine_;
};

}  // namespace clin
