#include "clin/complexify.hpp"

#include <algorithm>

#include "clin/error.hpp"

namespace clin {

ComplexPair operator+(const ComplexPair& a, const ComplexPair& b) { return {a.re + b.re, a.im + b.im}; }
ComplexPair operator-(const ComplexPair& a, const ComplexPair& b) { return {a.re - b.re, a.im - b.im}; }
ComplexPair operator-(const ComplexPair& a) { return {-a.re, -a.im}; }

ComplexPair operator*(const ComplexPair& a, const ComplexPair& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexPair operator*(const Rational& c, const ComplexPair& a) { return {Expr(c) * a.re, Expr(c) * a.im}; }

ComplexPair conjugate(const ComplexPair& a) { return {a.re, -a.im}; }

ComplexPair reciprocal(const ComplexPair& a) {
  if (a.im.is_zero()) return {pow(a.re, Expr(-1)), Expr(0)};
  const Expr m = pow(a.re * a.re + a.im * a.im, Expr(-1));
  return {a.re * m, -(a.im * m)};
}

ComplexPair operator/(const ComplexPair& a, const ComplexPair& b) { return a * reciprocal(b); }

ComplexPair pair_pow(const ComplexPair& a, long n) {
  if (n < 0) return reciprocal(pair_pow(a, -n));
  ComplexPair r{Expr(1), Expr(0)};
  for (long k = 0; k < n; ++k) r = r * a;
  return r;
}

Expr join(const ComplexPair& p) { return p.re + Expr::imaginary_unit() * p.im; }

namespace {

ComplexPair apply_pair(Function fn, const std::vector<ComplexPair>& args) {
  const ComplexPair& z = args[0];
  if (std::all_of(args.begin(), args.end(), [](const ComplexPair& a) { return a.im.is_zero(); })) {
    std::vector<Expr> re;
    for (const auto& a : args) re.push_back(a.re);
    return {apply(fn, std::move(re)), Expr(0)};
  }
  switch (fn) {
    case Function::Exp: return pair_apply("exp", z);
    case Function::Ln: return pair_apply("ln", z);
    case Function::Sin: return pair_apply("sin", z);
    case Function::Cos: return pair_apply("cos", z);
    case Function::Sqrt: return pair_apply("sqrt", z);
    case Function::Arctan: {
      // arctan w = (1/(2i)) ln((1 + i w)/(1 - i w))
      const ComplexPair iw = ComplexPair{Expr(0), Expr(1)} * z;
      const ComplexPair one{Expr(1), Expr(0)};
      const ComplexPair l = pair_apply("ln", (one + iw) / (one - iw));
      return {Expr(Rational(1, 2)) * l.im, Expr(Rational(-1, 2)) * l.re};
    }
    case Function::Arctan2: {
      // -i ln((x + i y)/sqrt(x^2 + y^2))
      const ComplexPair& y = args[0];
      const ComplexPair& x = args[1];
      const ComplexPair iy = ComplexPair{Expr(0), Expr(1)} * y;
      const ComplexPair r = pair_apply("sqrt", x * x + y * y);
      const ComplexPair l = pair_apply("ln", (x + iy) / r);
      return {l.im, -l.re};
    }
  }
  throw Error(ErrorCode::UnsupportedFunction, "no complex split for this function");
}

}  // namespace

ComplexPair split(const Expr& e) {
  if (!contains_imaginary_unit(e)) return {e, Expr(0)};
  switch (e.kind()) {
    case NodeKind::Symbol:
      return {Expr(0), Expr(1)};
    case NodeKind::Sum: {
      std::vector<Expr> re, im;
      for (const auto& t : e.operands()) {
        ComplexPair p = split(t);
        re.push_back(p.re);
        im.push_back(p.im);
      }
      return {add(std::move(re)), add(std::move(im))};
    }
    case NodeKind::Product: {
      ComplexPair acc{Expr(1), Expr(0)};
      for (const auto& f : e.operands()) acc = acc * split(f);
      return acc;
    }
    case NodeKind::Power: {
      const Expr& x = e.exponent();
      if (x.is_integer() && abs(x.value()) <= 64) return pair_pow(split(e.base()), x.value().get_num().get_si());
      if (x.is_constant() && x.value() == Rational(1, 2)) return pair_apply("sqrt", split(e.base()));
      if (x.is_constant() && x.value() == Rational(-1, 2)) return reciprocal(pair_apply("sqrt", split(e.base())));
      // b^x = exp(x ln b)
      return pair_apply("exp", split(x) * pair_apply("ln", split(e.base())));
    }
    case NodeKind::Apply: {
      std::vector<ComplexPair> args;
      for (const auto& a : e.operands()) args.push_back(split(a));
      return apply_pair(e.function(), args);
    }
    default:
      break;
  }
  return {e, Expr(0)};
}

ComplexPair pair_apply(std::string_view fn, const ComplexPair& p) {
  const Expr& a = p.re;
  const Expr& b = p.im;
  const Expr half(Rational(1, 2));
  if (fn == "reciprocal") return reciprocal(p);
  if (fn == "square") return expand(p * p);
  if (fn == "cube") return expand(p * p * p);
  if (fn == "exp") {
    if (b.is_zero()) return {exp(a), Expr(0)};
    return {exp(a) * cos(b), exp(a) * sin(b)};
  }
  if (fn == "ln" || fn == "log") return {half * ln(a * a + b * b), arctan2(b, a)};
  if (fn == "sqrt") {
    const Expr r = pow(a * a + b * b, Expr(Rational(1, 4)));
    const Expr t = half * arctan2(b, a);
    return {r * cos(t), r * sin(t)};
  }
  if (fn == "sin" || fn == "cos") {
    const Expr ch = half * (exp(b) + exp(-b));
    const Expr sh = half * (exp(b) - exp(-b));
    if (fn == "sin") return {sin(a) * ch, cos(a) * sh};
    return {cos(a) * ch, -(sin(a) * sh)};
  }
  throw Error(ErrorCode::UnsupportedFunction, "no complex split for " + std::string(fn));
}

ComplexPair normalize(const ComplexPair& p) { return {normalize(p.re), normalize(p.im)}; }
ComplexPair expand(const ComplexPair& p) { return {expand(p.re), expand(p.im)}; }
ComplexPair substitute(const ComplexPair& p, const Bindings& b) { return {substitute(p.re, b), substitute(p.im, b)}; }

ComplexPair partial(const ComplexPair& p, const std::string& wrt, const PartialRule& rule) {
  return {differentiate(p.re, wrt, rule), differentiate(p.im, wrt, rule)};
}

namespace {

ComplexPair wirtinger(const ComplexPair& w, const std::string& a, const std::string& b, const PartialRule& rule) {
  const Expr half(Rational(1, 2));
  const Expr w1a = differentiate(w.re, a, rule);
  const Expr w1b = differentiate(w.re, b, rule);
  const Expr w2a = differentiate(w.im, a, rule);
  const Expr w2b = differentiate(w.im, b, rule);
  return {half * (w1a + w2b), half * (w2a - w1b)};
}

}  // namespace

ComplexPair d_u(const ComplexPair& w, const std::string& f, const std::string& g, const PartialRule& rule) {
  return wirtinger(w, f, g, rule);
}

ComplexPair d_z(const ComplexPair& w, const std::string& x, const std::string& y, const PartialRule& rule) {
  return wirtinger(w, x, y, rule);
}

std::pair<Expr, Expr> cr_residual(const Expr& f, const Expr& g, const std::string& x, const std::string& y) {
  return {differentiate(f, x) - differentiate(g, y), differentiate(f, y) + differentiate(g, x)};
}

}  // namespace clin
