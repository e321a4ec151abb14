#include <string>
#include <vector>

#include "clin/expr.hpp"

namespace clin {

namespace {

constexpr int kSumPrec = 1;
constexpr int kProductPrec = 2;
constexpr int kPowerPrec = 4;
constexpr int kAtomPrec = 5;

std::string print(const Expr& e, int parent);

std::string wrap(std::string s, int own, int parent) {
  if (own < parent) return "(" + s + ")";
  return s;
}

bool negative_term(const Expr& t) {
  if (t.is_constant()) return sgn(t.value()) < 0;
  if (t.kind() == NodeKind::Product && t.operands().front().is_constant())
    return sgn(t.operands().front().value()) < 0;
  return false;
}

bool is_reciprocal_factor(const Expr& f) {
  return f.kind() == NodeKind::Power && f.exponent().is_constant() && sgn(f.exponent().value()) < 0;
}

std::string print_product(const Rational& coeff, const std::vector<Expr>& factors, int parent) {
  std::vector<std::string> num;
  std::vector<std::string> den;
  std::vector<int> den_prec;
  mpz_class p = abs(coeff.get_num());
  const mpz_class& q = coeff.get_den();
  for (const auto& f : factors) {
    if (is_reciprocal_factor(f)) {
      Expr inv = pow(f.base(), Expr(Rational(-f.exponent().value())));
      den.push_back(print(inv, kPowerPrec));
      den_prec.push_back(inv.kind() == NodeKind::Power ? kPowerPrec : kAtomPrec);
    } else {
      num.push_back(print(f, kProductPrec + 1));
    }
  }
  if (p != 1 || num.empty()) num.insert(num.begin(), p.get_str());
  if (q != 1) {
    den.insert(den.begin(), q.get_str());
    den_prec.insert(den_prec.begin(), kAtomPrec);
  }
  std::string s = sgn(coeff) < 0 ? "-" : "";
  for (std::size_t i = 0; i < num.size(); ++i) s += (i ? "*" : "") + num[i];
  if (!den.empty()) {
    std::string d;
    for (std::size_t i = 0; i < den.size(); ++i) d += (i ? "*" : "") + den[i];
    s += "/" + (den.size() == 1 ? d : "(" + d + ")");
  }
  return wrap(s, kProductPrec, parent);
}

std::string print(const Expr& e, int parent) {
  switch (e.kind()) {
    case NodeKind::Constant: {
      const Rational& v = e.value();
      std::string s = to_string(v);
      bool compound = sgn(v) < 0 || v.get_den() != 1;
      return compound ? wrap(s, kProductPrec, parent) : s;
    }
    case NodeKind::Symbol:
      return e.name();
    case NodeKind::Sum: {
      std::string s;
      bool first = true;
      for (const auto& t : e.operands()) {
        if (first) {
          s = print(t, kSumPrec);
          first = false;
        } else if (negative_term(t)) {
          s += " - " + print(-t, kSumPrec + 1);
        } else {
          s += " + " + print(t, kSumPrec + 1);
        }
      }
      return wrap(s, kSumPrec, parent);
    }
    case NodeKind::Product: {
      auto ops = e.operands();
      Rational c = 1;
      std::vector<Expr> fs;
      for (const auto& op : ops) {
        if (op.is_constant())
          c *= op.value();
        else
          fs.push_back(op);
      }
      return print_product(c, fs, parent);
    }
    case NodeKind::Power: {
      if (is_reciprocal_factor(e)) return print_product(Rational(1), {e}, parent);
      std::string s = print(e.base(), kAtomPrec) + "^" + print(e.exponent(), kAtomPrec);
      return wrap(s, kPowerPrec, parent);
    }
    case NodeKind::Apply: {
      std::string s(function_name(e.function()));
      s += "(";
      bool first = true;
      for (const auto& a : e.operands()) {
        if (!first) s += ", ";
        s += print(a, 0);
        first = false;
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const Expr& e) { return print(e, 0); }

}  // namespace clin
