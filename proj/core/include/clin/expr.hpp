#pragma once

// Immutable symbolic expression trees over real symbols with exact rational
// constants. Nodes are shared and never mutated after construction.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clin {

using Rational = mpq_class;
using Complex = std::complex<double>;

enum class NodeKind : std::uint8_t { Constant, Symbol, Sum, Product, Power, Apply };

enum class Function : std::uint8_t { Exp, Ln, Sin, Cos, Arctan, Arctan2, Sqrt };

std::string_view function_name(Function fn);
std::optional<Function> function_from_name(std::string_view name);
int function_arity(Function fn);

class Expr;

namespace detail {
struct Node;
}

class Expr {
 public:
  /// The constant 0.
  Expr();
  Expr(int value);  // NOLINT: integers convert implicitly
  Expr(long value);  // NOLINT
  explicit Expr(const Rational& value);

  static Expr symbol(std::string name);
  /// The reserved symbol `%i`, evaluated as the imaginary unit.
  static Expr imaginary_unit();

  // Un-normalized constructors. Everything else in the library produces
  // normalized trees; these exist for the parser and for tests of normalize.
  static Expr raw_sum(std::vector<Expr> terms);
  static Expr raw_product(std::vector<Expr> factors);
  static Expr raw_power(Expr base, Expr exponent);
  static Expr raw_apply(Function fn, std::vector<Expr> args);

  NodeKind kind() const;
  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_symbol() const { return kind() == NodeKind::Symbol; }
  bool is_zero() const;
  bool is_one() const;
  bool is_integer() const;
  bool is_imaginary_unit() const;

  const Rational& value() const;  // Constant only
  const std::string& name() const;  // Symbol only
  Function function() const;  // Apply only
  std::span<const Expr> operands() const;
  const Expr& base() const { return operands()[0]; }  // Power only
  const Expr& exponent() const { return operands()[1]; }  // Power only

  std::size_t hash() const;
  const detail::Node* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  friend Expr make_node(detail::Node node);

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  NodeKind kind = NodeKind::Constant;
  Function fn = Function::Exp;
  Rational value;
  std::string name;
  std::vector<Expr> operands;
  std::size_t hash = 0;
};
}  // namespace detail

/// Deterministic total order on structure.
int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Canonicalizing builders. Operands are assumed normalized.
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(Function fn, std::vector<Expr> args);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr arctan(const Expr& a);
Expr arctan2(const Expr& y, const Expr& x);
Expr sqrt(const Expr& a);

/// Rebuilds bottom-up through the canonicalizing builders. Idempotent.
Expr normalize(const Expr& e);

/// Distributes products over sums and expands positive integer powers of
/// sums. Negative powers stay atomic (with expanded bases). Throws
/// ExpansionTooLarge past `max_terms` intermediate terms.
Expr expand(const Expr& e, std::size_t max_terms = 20000);

/// Free symbols, excluding the imaginary unit.
std::set<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, std::string_view symbol);
bool contains_imaginary_unit(const Expr& e);

/// Simultaneous substitution followed by normalization.
using Bindings = std::map<std::string, Expr, std::less<>>;
Expr substitute(const Expr& e, const Bindings& bindings);

std::size_t node_count(const Expr& e);

/// Text form accepted by the equation parser.
std::string to_string(const Expr& e);
std::string to_string(const Rational& q);

}  // namespace clin
