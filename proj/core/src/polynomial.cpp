#include <algorithm>
#include <numeric>

#include "clin/error.hpp"
#include "clin/symexpr.hpp"

namespace clin {

namespace {

// Working form: monomial -> list of coefficient terms, summed at the end.
using Terms = std::map<Monomial, std::vector<Expr>>;

constexpr int kDegreeGuard = 64;

class Collector {
 public:
  explicit Collector(std::span<const std::string> in) : in_(in.begin(), in.end()) {}

  Terms operator()(const Expr& e) {
    if (!depends(e)) return {{Monomial(in_.size(), 0), {e}}};
    switch (e.kind()) {
      case NodeKind::Symbol: {
        Monomial m(in_.size(), 0);
        m[index_of(e.name())] = 1;
        return {{m, {Expr(1)}}};
      }
      case NodeKind::Sum: {
        Terms acc;
        for (const auto& t : e.operands()) merge(acc, (*this)(t));
        return acc;
      }
      case NodeKind::Product: {
        Terms acc{{Monomial(in_.size(), 0), {Expr(1)}}};
        for (const auto& f : e.operands()) acc = multiply(acc, (*this)(f));
        return acc;
      }
      case NodeKind::Power: {
        if (depends(e.exponent())) fail("a collected symbol appears in an exponent");
        if (!e.exponent().is_integer()) fail("a collected symbol appears under a non-integer power");
        if (sgn(e.exponent().value()) < 0) fail("a collected symbol appears in a denominator");
        if (e.exponent().value() > kDegreeGuard)
          throw Error(ErrorCode::DegreeTooHigh, "exponent " + to_string(e.exponent()) + " exceeds the degree bound");
        const long n = e.exponent().value().get_num().get_si();
        Terms base = (*this)(e.base());
        Terms acc{{Monomial(in_.size(), 0), {Expr(1)}}};
        for (long k = 0; k < n; ++k) acc = multiply(acc, base);
        return acc;
      }
      case NodeKind::Apply:
        fail("a collected symbol appears inside " + std::string(function_name(e.function())));
      default:
        break;
    }
    return {};
  }

 private:
  [[noreturn]] static void fail(const std::string& why) { throw Error(ErrorCode::NotPolynomial, why); }

  bool depends(const Expr& e) const {
    return std::any_of(in_.begin(), in_.end(), [&](const std::string& s) { return depends_on(e, s); });
  }

  std::size_t index_of(const std::string& s) const {
    return static_cast<std::size_t>(std::find(in_.begin(), in_.end(), s) - in_.begin());
  }

  static void merge(Terms& acc, Terms&& part) {
    for (auto& [m, ts] : part) {
      auto& dst = acc[m];
      dst.insert(dst.end(), std::make_move_iterator(ts.begin()), std::make_move_iterator(ts.end()));
    }
  }

  Terms multiply(const Terms& a, const Terms& b) const {
    Terms out;
    for (const auto& [ma, ta] : a) {
      const Expr ca = add(ta);
      for (const auto& [mb, tb] : b) {
        Monomial m(ma.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
        if (total_degree(m) > kDegreeGuard)
          throw Error(ErrorCode::DegreeTooHigh, "intermediate degree exceeds the guard");
        out[m].push_back(mul({ca, add(tb)}));
      }
    }
    return out;
  }

  std::vector<std::string> in_;
};

bool symbolically_zero(const Expr& c) {
  if (c.is_zero()) return true;
  try {
    return expand(c, 4000).is_zero();
  } catch (const Error& err) {
    if (err.code() != ErrorCode::ExpansionTooLarge) throw;
    return false;
  }
}

}  // namespace

PolynomialCoefficients collect_polynomial(const Expr& e, std::span<const std::string> in, int max_degree) {
  Terms terms = Collector(in)(e);
  PolynomialCoefficients out;
  for (auto& [m, ts] : terms) {
    Expr c = add(std::move(ts));
    if (symbolically_zero(c)) continue;
    if (total_degree(m) > max_degree) {
      if (is_identically_zero(c).is_zero()) continue;
      throw Error(ErrorCode::DegreeTooHigh,
                  "monomial " + monomial_to_string(m, in) + " exceeds degree " + std::to_string(max_degree));
    }
    out.emplace(m, std::move(c));
  }
  return out;
}

std::string monomial_to_string(const Monomial& m, std::span<const std::string> in) {
  std::string s;
  for (std::size_t i = 0; i < m.size() && i < in.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += in[i];
    if (m[i] > 1) s += "^" + std::to_string(m[i]);
  }
  return s.empty() ? "1" : s;
}

int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

}  // namespace clin
