#include <gtest/gtest.h>

#include "clin/error.hpp"
#include "clin/symexpr.hpp"
#include "testkit.hpp"

using namespace clin;
using testkit::q;
using testkit::sym;

namespace {

const Expr x = sym("x"), y = sym("y"), f = sym("f"), g = sym("g");

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Differentiate, PowerRule) { EXPECT_EQ(differentiate(x * x, "x"), 2 * x); }

TEST(Differentiate, DerivativeSymbolsAreOpaque) {
  const Expr fp = sym("f'");
  EXPECT_EQ(differentiate(-3 * f * fp, "f"), -3 * fp);
  EXPECT_TRUE(differentiate(fp, "f").is_zero());
}

TEST(Differentiate, LogOfModulusMatchesFiniteDifference) {
  const Expr e = ln(f * f + g * g);
  const Expr d = differentiate(e, "f");
  const std::vector<std::string> vars{"f", "g"};
  EXPECT_NEAR(testkit::eval_real(d, vars, {1, 2}), 0.4, 1e-15);
  EXPECT_NEAR(testkit::central_difference(e, vars, {1, 2}, 0), 0.4, 1e-8);
}

TEST(Differentiate, BatteryMatchesCentralDifferences) {
  testkit::Gen gen(7);
  const auto& vars = testkit::battery_vars();
  for (const Expr& e : testkit::battery()) {
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Expr d = differentiate(e, vars[k]);
      for (int s = 0; s < 100; ++s) {
        std::vector<double> at{gen.real(0.5, 1.5), gen.real(0.5, 1.5), gen.real(0.5, 1.5), gen.real(0.5, 1.5)};
        const double exact = testkit::eval_real(d, vars, at);
        const double fd = testkit::central_difference(e, vars, at, k);
        EXPECT_LE(std::abs(exact - fd), 1e-6 * std::max(1.0, std::abs(exact))) << to_string(e) << " d/d" << vars[k];
      }
    }
  }
}

TEST(Differentiate, Linearity) {
  testkit::Gen gen(11);
  const auto& vars = testkit::battery_vars();
  for (int t = 0; t < 20; ++t) {
    const Expr e1 = gen.expression(vars, 3), e2 = gen.expression(vars, 3);
    const Expr a = gen.rational(), b = gen.rational();
    const Expr lhs = differentiate(a * e1 + b * e2, "x");
    const Expr rhs = a * differentiate(e1, "x") + b * differentiate(e2, "x");
    ZeroTestOptions o;
    o.domain = SampleDomain::RealBox;
    EXPECT_TRUE(is_identically_zero(lhs - rhs, vars, o).is_zero()) << to_string(e1) << " | " << to_string(e2);
  }
}

TEST(Differentiate, MixedPartialsCommute) {
  const auto& vars = testkit::battery_vars();
  ZeroTestOptions o;
  o.domain = SampleDomain::RealBox;
  o.box_half_width = 0.5;
  for (const Expr& e : testkit::battery()) {
    for (std::size_t a = 0; a < vars.size(); ++a)
      for (std::size_t b = a + 1; b < vars.size(); ++b) {
        const Expr r = differentiate(differentiate(e, vars[a]), vars[b]) -
                       differentiate(differentiate(e, vars[b]), vars[a]);
        EXPECT_FALSE(is_identically_zero(r, vars, o).is_nonzero()) << to_string(e);
      }
  }
}

TEST(Differentiate, ChainRuleHookForFunctionSymbols) {
  // w(x) with w' written w_x.
  PartialRule rule = [](const std::string& s, const std::string& wrt) -> std::optional<Expr> {
    if (s == "w" && wrt == "x") return Expr::symbol("w_x");
    return std::nullopt;
  };
  EXPECT_EQ(differentiate(x * sym("w"), "x", rule), sym("w") + x * sym("w_x"));
}

TEST(Normalize, FlattensAndOrders) {
  const Expr raw = Expr::raw_sum({Expr::raw_sum({x, y}), Expr::raw_product({Expr(2), x}), Expr(0)});
  const Expr n = normalize(raw);
  EXPECT_EQ(n, 3 * x + y);
  EXPECT_EQ(normalize(n), n);
  EXPECT_EQ(normalize(Expr::raw_sum({y, x})), normalize(Expr::raw_sum({x, y})));
}

TEST(Normalize, DivisionAndNegationAreCanonical) {
  const Expr e = x / y;
  ASSERT_EQ(e.kind(), NodeKind::Product);
  bool saw_power = false;
  for (const Expr& op : e.operands())
    if (op.kind() == NodeKind::Power && op.exponent() == Expr(-1)) saw_power = true;
  EXPECT_TRUE(saw_power);
  EXPECT_EQ(-x, Expr(-1) * x);
}

TEST(Normalize, IdempotentAndEvaluationPreserving) {
  testkit::Gen gen(3);
  const std::vector<std::string> vars{"x", "y", "f", "g"};
  for (int t = 0; t < 40; ++t) {
    const Expr e = gen.expression(vars, 4);
    const Expr n = normalize(e);
    EXPECT_EQ(normalize(n), n);
    std::vector<double> at{gen.real(0.5, 1.5), gen.real(0.5, 1.5), gen.real(0.5, 1.5), gen.real(0.5, 1.5)};
    const double a = testkit::eval_real(e, vars, at), b = testkit::eval_real(n, vars, at);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(Substitute, Simple) {
  EXPECT_EQ(substitute(f * f + g * g, {{"f", x}, {"g", Expr(0)}}), x * x);
}

TEST(Substitute, IsSimultaneous) {
  EXPECT_EQ(substitute(f + 2 * g, {{"f", g}, {"g", f}}), g + 2 * f);
}

TEST(Substitute, RenamesDerivativeSymbols) {
  const Expr e = sym("f_x") + sym("g_y");
  EXPECT_EQ(substitute(e, {{"f_x", 2 * sym("h") - sym("g_y")}}), 2 * sym("h"));
}

TEST(Substitute, ComposesWithEvaluation) {
  testkit::Gen gen(5);
  const std::vector<std::string> vars{"x", "y", "f", "g"};
  for (int t = 0; t < 50; ++t) {
    const Expr e = gen.expression(vars, 3);
    const Expr fx = gen.expression({"x", "y"}, 2), gx = gen.expression({"x", "y"}, 2);
    const Expr s = substitute(e, {{"f", fx}, {"g", gx}});
    const double xv = gen.real(0.5, 1.5), yv = gen.real(0.5, 1.5);
    const double fv = testkit::eval_real(fx, {"x", "y"}, {xv, yv});
    const double gv = testkit::eval_real(gx, {"x", "y"}, {xv, yv});
    const double direct = testkit::eval_real(e, vars, {xv, yv, fv, gv});
    const double composed = testkit::eval_real(s, {"x", "y"}, {xv, yv});
    EXPECT_LE(std::abs(direct - composed), 1e-12 * std::max(1.0, std::abs(direct))) << to_string(e);
  }
}

TEST(EvalComplex, Square) {
  const Complex v = eval_complex(x * x, {{"x", Complex(1, 1)}});
  EXPECT_NEAR(std::abs(v - Complex(0, 2)), 0.0, 1e-15);
}

TEST(EvalComplex, LogOfOne) { EXPECT_EQ(eval_complex(ln(f * f + g * g), {{"f", 1.0}, {"g", 0.0}}), Complex(0.0)); }

TEST(EvalComplex, RationalSolutionMatchesComplexArithmetic) {
  const Expr a = sym("a"), b = sym("b");
  const Expr u = 2 * (x - a) / (x * x - 2 * a * x - 2 * b);
  const Complex av(0.1, 0.2), bv(0.4, -0.1), xv(0.3, 0.0);
  const Complex oracle = 2.0 * (xv - av) / (xv * xv - 2.0 * av * xv - 2.0 * bv);
  EXPECT_LE(std::abs(eval_complex(u, {{"x", xv}, {"a", av}, {"b", bv}}) - oracle), 1e-12);
}

TEST(EvalComplex, ArctanUsesLogForm) {
  const Complex w(0.3, 0.4);
  const Complex oracle = std::log((1.0 + Complex(0, 1) * w) / (1.0 - Complex(0, 1) * w)) / Complex(0, 2);
  EXPECT_LE(std::abs(eval_complex(arctan(x), {{"x", w}}) - oracle), 1e-14);
}

TEST(EvalComplex, ImaginaryUnit) {
  EXPECT_EQ(eval_complex(Expr::imaginary_unit() * x, {{"x", 2.0}}), Complex(0, 2));
}

TEST(EvalComplex, DomainErrors) {
  EXPECT_EQ(code_of([] { eval_complex(ln(x), {{"x", 0.0}}); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { eval_complex(1 / x, {{"x", 0.0}}); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { eval_complex(exp(x), {{"x", 1e6}}); }), ErrorCode::DomainError);
}

TEST(EvalComplex, UnboundSymbolIsAnError) {
  EXPECT_THROW(eval_complex(x + y, {{"x", 1.0}}), Error);
}

TEST(ZeroTest, TrivialCancellation) {
  const Expr raw = Expr::raw_sum({x, Expr::raw_product({Expr(-1), x})});
  EXPECT_TRUE(is_identically_zero(raw, {}).is_zero());
}

TEST(ZeroTest, NonZeroCarriesWitness) {
  const Expr e = -10 * f;
  const std::vector<std::string> vars{"f"};
  const ZeroVerdict v = is_identically_zero(e, vars);
  ASSERT_TRUE(v.is_nonzero());
  ASSERT_TRUE(v.witness.count("f"));
  const Complex at = eval_complex(e, v.witness);
  EXPECT_EQ(at, v.witness_value);
  EXPECT_GT(std::abs(at), 1e-9);
}

TEST(ZeroTest, TrigIdentityNeedsSampling) {
  const Expr e = sin(x) * sin(x) + cos(x) * cos(x) - 1;
  const ZeroVerdict v = is_identically_zero(e, std::vector<std::string>{"x"});
  EXPECT_TRUE(v.is_zero());
  EXPECT_FALSE(v.exact);
  EXPECT_EQ(v.valid_samples, 64);
}

TEST(ZeroTest, UnknownWhenDomainIsEmpty) {
  ZeroTestOptions o;
  o.samples = 4;
  const ZeroVerdict v = is_identically_zero(ln(x - x), std::vector<std::string>{"x"}, o);
  EXPECT_EQ(v.kind, ZeroVerdict::Kind::Unknown);
  EXPECT_EQ(v.valid_samples, 0);
}

TEST(ZeroTest, SeedDeterminesWitness) {
  const Expr e = f + g * g;
  const std::vector<std::string> vars{"f", "g"};
  const ZeroVerdict a = is_identically_zero(e, vars), b = is_identically_zero(e, vars);
  EXPECT_EQ(a.witness, b.witness);
  ZeroTestOptions o;
  o.seed = 43;
  EXPECT_NE(is_identically_zero(e, vars, o).witness, a.witness);
}

TEST(CollectPolynomial, CubicPatternOfEmdenRightSide) {
  const Expr fp = sym("f'"), gp = sym("g'");
  const Expr e = -3 * f * fp + 3 * g * gp - f * f * f + 3 * f * g * g;
  const std::vector<std::string> in{"f'", "g'"};
  const auto c = collect_polynomial(e, in, 3);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.at({1, 0}), -3 * f);
  EXPECT_EQ(c.at({0, 1}), 3 * g);
  EXPECT_EQ(c.at({0, 0}), -f * f * f + 3 * f * g * g);
}

TEST(CollectPolynomial, ZeroIsEmpty) {
  const std::vector<std::string> in{"f'", "g'"};
  EXPECT_TRUE(collect_polynomial(Expr(0), in, 3).empty());
}

TEST(CollectPolynomial, Errors) {
  const Expr fp = sym("f'");
  const std::vector<std::string> in{"f'", "g'"};
  EXPECT_EQ(code_of([&] { collect_polynomial(pow(fp, Expr(4)), in, 3); }), ErrorCode::DegreeTooHigh);
  EXPECT_EQ(code_of([&] { collect_polynomial(sin(fp), in, 3); }), ErrorCode::NotPolynomial);
  EXPECT_EQ(code_of([&] { collect_polynomial(1 / (1 + fp), in, 3); }), ErrorCode::NotPolynomial);
  EXPECT_EQ(code_of([&] { collect_polynomial(sqrt(fp), in, 3); }), ErrorCode::NotPolynomial);
}

TEST(CollectPolynomial, Reconstructs) {
  testkit::Gen gen(9);
  const std::vector<std::string> in{"f'", "g'"};
  const std::vector<std::string> all{"x", "f", "g", "f'", "g'"};
  for (int t = 0; t < 30; ++t) {
    Expr e = 0;
    for (int k = 0; k < 4; ++k)
      e = e + gen.expression({"x", "f", "g"}, 2) * gen.polynomial(in, 3, 2);
    const auto c = collect_polynomial(e, in, 3);
    std::vector<Expr> terms;
    for (const auto& [m, coeff] : c)
      terms.push_back(coeff * pow(sym("f'"), Expr(m[0])) * pow(sym("g'"), Expr(m[1])));
    ZeroTestOptions o;
    o.domain = SampleDomain::RealBox;
    EXPECT_TRUE(is_identically_zero(add(terms) - e, all, o).is_zero());
    for (const auto& [m, coeff] : c) {
      EXPECT_FALSE(depends_on(coeff, "f'"));
      EXPECT_LE(total_degree(m), 3);
    }
  }
}

TEST(CollectPolynomial, MonomialNames) {
  const std::vector<std::string> in{"h", "l"};
  EXPECT_EQ(monomial_to_string({2, 1}, in), "h^2*l");
  EXPECT_EQ(monomial_to_string({0, 0}, in), "1");
}

TEST(Expand, BoundsIntermediateSize) {
  const Expr big = pow(x + y + f + g + 1, Expr(12));
  EXPECT_EQ(code_of([&] { expand(big, 100); }), ErrorCode::ExpansionTooLarge);
  EXPECT_EQ(expand((x + 1) * (x - 1)), x * x - 1);
}

TEST(Printer, RoundTripsThroughText) {
  testkit::Gen gen(21);
  const std::vector<std::string> vars{"x", "y", "f", "g"};
  for (int t = 0; t < 30; ++t) {
    const Expr e = gen.expression(vars, 3);
    EXPECT_EQ(parse_expression(to_string(e)), e) << to_string(e);
  }
}
