#pragma once

// Complex quantities as (real part, imaginary part) over real symbols.

#include <string>
#include <string_view>
#include <utility>

#include "clin/expr.hpp"
#include "clin/symexpr.hpp"

namespace clin {

struct ComplexPair {
  Expr re;
  Expr im;

  ComplexPair() = default;
  ComplexPair(Expr r, Expr i) : re(std::move(r)), im(std::move(i)) {}
  explicit ComplexPair(Expr r) : re(std::move(r)), im(0) {}  // NOLINT

  friend bool operator==(const ComplexPair&, const ComplexPair&) = default;
};

ComplexPair operator+(const ComplexPair& a, const ComplexPair& b);
ComplexPair operator-(const ComplexPair& a, const ComplexPair& b);
ComplexPair operator*(const ComplexPair& a, const ComplexPair& b);
ComplexPair operator/(const ComplexPair& a, const ComplexPair& b);
ComplexPair operator-(const ComplexPair& a);
ComplexPair operator*(const Rational& c, const ComplexPair& a);

ComplexPair conjugate(const ComplexPair& a);
ComplexPair reciprocal(const ComplexPair& a);
ComplexPair pair_pow(const ComplexPair& a, long n);

/// re + %i*im.
Expr join(const ComplexPair& p);
/// Real and imaginary parts of an expression over real symbols and `%i`.
ComplexPair split(const Expr& e);

/// One of: reciprocal, square, cube, exp, ln (log), sqrt, sin, cos.
/// Throws UnsupportedFunction otherwise.
ComplexPair pair_apply(std::string_view fn, const ComplexPair& p);

ComplexPair normalize(const ComplexPair& p);
ComplexPair expand(const ComplexPair& p);
ComplexPair substitute(const ComplexPair& p, const Bindings& b);

/// Partial derivative of both parts.
ComplexPair partial(const ComplexPair& p, const std::string& wrt, const PartialRule& rule = {});

/// (1/2)(W1_f + W2_g, W2_f - W1_g): d/du under u = f + i g.
ComplexPair d_u(const ComplexPair& w, const std::string& f = "f", const std::string& g = "g",
                const PartialRule& rule = {});

/// d/dz under z = x + i y.
ComplexPair d_z(const ComplexPair& w, const std::string& x = "x", const std::string& y = "y",
                const PartialRule& rule = {});

/// (f_x - g_y, f_y + g_x).
std::pair<Expr, Expr> cr_residual(const Expr& f, const Expr& g, const std::string& x = "x",
                                  const std::string& y = "y");

}  // namespace clin
