#include <unordered_map>

#include "clin/error.hpp"
#include "clin/symexpr.hpp"

namespace clin {

namespace {

class Differentiator {
 public:
  Differentiator(const std::string& wrt, const PartialRule& rule) : wrt_(wrt), rule_(rule) {}

  Expr operator()(const Expr& e) {
    if (e.is_constant()) return Expr(0);
    if (e.is_symbol()) {
      if (e.name() == wrt_) return Expr(1);
      if (rule_ && !e.is_imaginary_unit()) {
        if (auto d = rule_(e.name(), wrt_)) return *d;
      }
      return Expr(0);
    }
    if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    memo_.emplace(e.node(), r);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::Sum: {
        std::vector<Expr> ts;
        for (const auto& t : e.operands()) ts.push_back((*this)(t));
        return add(std::move(ts));
      }
      case NodeKind::Product: {
        auto ops = e.operands();
        std::vector<Expr> ts;
        for (std::size_t i = 0; i < ops.size(); ++i) {
          Expr d = (*this)(ops[i]);
          if (d.is_zero()) continue;
          std::vector<Expr> fs(ops.begin(), ops.end());
          fs[i] = d;
          ts.push_back(mul(std::move(fs)));
        }
        return add(std::move(ts));
      }
      case NodeKind::Power: {
        const Expr& b = e.base();
        const Expr& x = e.exponent();
        Expr db = (*this)(b);
        Expr dx = (*this)(x);
        if (dx.is_zero()) {
          if (db.is_zero()) return Expr(0);
          return mul({x, pow(b, x - Expr(1)), db});
        }
        // d(b^x) = b^x (x' ln b + x b'/b)
        return mul({e, add({mul({dx, ln(b)}), mul({x, db, pow(b, Expr(-1))})})});
      }
      case NodeKind::Apply:
        return apply_rule(e);
      default:
        return Expr(0);
    }
  }

  Expr apply_rule(const Expr& e) {
    const Expr& a = e.operands()[0];
    if (e.function() == Function::Arctan2) {
      const Expr& x = e.operands()[1];
      Expr dy = (*this)(a);
      Expr dx = (*this)(x);
      if (dy.is_zero() && dx.is_zero()) return Expr(0);
      return (x * dy - a * dx) / (x * x + a * a);
    }
    Expr da = (*this)(a);
    if (da.is_zero()) return Expr(0);
    switch (e.function()) {
      case Function::Exp: return e * da;
      case Function::Ln: return da / a;
      case Function::Sin: return cos(a) * da;
      case Function::Cos: return -(sin(a) * da);
      case Function::Arctan: return da / (Expr(1) + a * a);
      case Function::Sqrt: return da / (Expr(2) * e);
      default:
        throw Error(ErrorCode::UnsupportedFunction,
                    "no derivative rule for " + std::string(function_name(e.function())));
    }
  }

  const std::string& wrt_;
  const PartialRule& rule_;
  std::unordered_map<const detail::Node*, Expr> memo_;
};

}  // namespace

Expr differentiate(const Expr& e, const std::string& wrt, const PartialRule& rule) {
  Differentiator d(wrt, rule);
  return d(e);
}

Expr differentiate(const Expr& e, std::span<const std::string> wrt, const PartialRule& rule) {
  Expr r = e;
  for (const auto& s : wrt) r = differentiate(r, s, rule);
  return r;
}

}  // namespace clin
