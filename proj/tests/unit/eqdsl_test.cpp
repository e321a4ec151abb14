#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "clin/eqdsl.hpp"
#include "clin/error.hpp"
#include "testkit.hpp"

using namespace clin;
using testkit::sym;

namespace {

const char* kEmden = R"(
ode2 emden {
  vars: x, f, g;
  f'' = -3*f*f' + 3*g*g' - f^3 + 3*f*g^2;
  g'' = -3*g*f' - 3*f*g' - 3*f^2*g + g^3;
}
)";

struct Position {
  ErrorCode code;
  int line;
  int column;
};

Position parse_failure(const std::string& text) {
  try {
    if (text.find("map") != std::string::npos) parse_transformation(text);
    else parse_system(text);
  } catch (const ParseError& e) {
    return {e.code(), e.line(), e.column()};
  }
  ADD_FAILURE() << "parsed without error:\n" << text;
  return {ErrorCode::InvalidArgument, 0, 0};
}

}  // namespace

TEST(ParseSystem, EmdenSystem) {
  const SystemSpec s = parse_system(kEmden);
  EXPECT_EQ(s.kind, SystemKind::ODE2);
  EXPECT_EQ(s.name, "emden");
  EXPECT_EQ(s.independents, std::vector<std::string>{"x"});
  ASSERT_EQ(s.equations.size(), 2u);
  EXPECT_EQ(s.equations[0].lhs, sym("f''"));
  const Expr f = sym("f"), g = sym("g"), fp = sym("f'"), gp = sym("g'");
  EXPECT_EQ(s.equations[0].rhs, -3 * f * fp + 3 * g * gp - f * f * f + 3 * f * g * g);
}

TEST(ParseSystem, LaneEmdenWithAuxiliarySymbols) {
  const SystemSpec s = parse_system(testkit::fixture_text("lane_emden_pde.eqs"));
  EXPECT_EQ(s.kind, SystemKind::PDE2);
  EXPECT_TRUE(s.uses_aux);
  EXPECT_TRUE(depends_on(s.equations[0].rhs, "h"));
  EXPECT_TRUE(depends_on(s.equations[0].rhs, "l"));
  EXPECT_EQ(s.constraints.size(), 2u);
}

TEST(ParseSystem, PdeLeftSidesRecognizedStructurally) {
  const SystemSpec a = parse_system(R"(pde2 { vars: x, y, f, g;
    f_xx - f_yy + 2*g_xy = 0;  g_xx - g_yy - 2*f_xy = 0; })");
  const SystemSpec b = parse_system(R"(pde2 { vars: x, y, f, g;
    2*g_xy + f_xx - f_yy = 0;  -2*f_xy - g_yy + g_xx = 0; })");
  const auto pa = principal_unknowns(a), pb = principal_unknowns(b);
  EXPECT_EQ(pa, pb);
  for (std::size_t k = 0; k < 2; ++k)
    EXPECT_TRUE(is_identically_zero(principal_residual(a, a.equations[k]) - principal_residual(b, b.equations[k]))
                    .is_zero());
}

TEST(ParseSystem, DecimalsAreExact) {
  const SystemSpec s = parse_system("ode2 { vars: x, f, g; f'' = 0.25*f; g'' = 1.5e-1*g; }");
  EXPECT_EQ(s.equations[0].rhs, Expr(Rational(1, 4)) * sym("f"));
  EXPECT_EQ(s.equations[1].rhs, Expr(Rational(3, 20)) * sym("g"));
}

TEST(ParseSystem, EmptyBlockIsSyntaxError) {
  EXPECT_EQ(parse_failure("ode2 emden { vars: x, f, g; }").code, ErrorCode::SyntaxError);
}

TEST(ParseSystem, SemanticErrors) {
  EXPECT_EQ(parse_failure("ode2 { vars: x, f, g; f' = f; g'' = g; }").code, ErrorCode::WrongLeftSide);
  EXPECT_EQ(parse_failure("ode2 { vars: x, f, g; f'' = f; f'' = g; }").code, ErrorCode::DuplicateEquation);
  EXPECT_EQ(parse_failure("ode2 { vars: x, f, g; f'' = k*f; g'' = g; }").code, ErrorCode::UndeclaredSymbol);
  EXPECT_EQ(parse_failure("ode2 { vars: x, f, g; f'' = f_x; g'' = g; }").code, ErrorCode::UndeclaredSymbol);
}

TEST(ParseSystem, ParamsAndLets) {
  const SystemSpec s = parse_system(R"(ode2 { vars: x, f, g; params: a = 1/2, b;
    let s = f^2 + g^2;  f'' = a*s; g'' = b; })");
  ASSERT_EQ(s.params.size(), 2u);
  EXPECT_EQ(*s.params[0].value, Expr(Rational(1, 2)));
  EXPECT_FALSE(s.params[1].value.has_value());
  EXPECT_EQ(s.equations[0].rhs, sym("a") * (sym("f") * sym("f") + sym("g") * sym("g")));
}

TEST(ParseSystem, FunctionDeclarationsGiveChainRule) {
  const SystemSpec s = parse_system(testkit::fixture_text("newtonian.eqs"));
  ASSERT_EQ(s.functions.size(), 2u);
  const PartialRule rule = s.partial_rule();
  // w1(p, q) with p = 2f - x^2: d/dx w1 = -2x w1_p under the analytic normal form.
  EXPECT_EQ(differentiate(sym("w1"), "x", rule), -2 * sym("x") * sym("w1_p"));
  // Analytic pair: d/dg w1 = 2 * (-w2_p), d/dg w2 = 2 * w1_p.
  EXPECT_EQ(differentiate(sym("w1"), "g", rule), -2 * sym("w2_p"));
  EXPECT_EQ(differentiate(sym("w2"), "g", rule), 2 * sym("w1_p"));
}

TEST(ParseSystem, AnalyticPairValidation) {
  EXPECT_EQ(parse_failure("ode2 { vars: x, f, g; func: w1(x), w2(x); analytic: w1, w3; f'' = w1; g'' = w2; }").code,
            ErrorCode::UndeclaredSymbol);
  EXPECT_EQ(parse_failure("ode2 { vars: x, f, g; func: w1(x), w2(x); analytic: w1, w2; f'' = w1; g'' = w2; }").code,
            ErrorCode::SyntaxError);
}

TEST(ParseTransformation, ComplexMapEnteredAsRealParts) {
  const PointTransformation m = parse_transformation(testkit::fixture_text("emden_complex.map"));
  EXPECT_EQ(m.source, (std::vector<std::string>{"x", "f", "g"}));
  EXPECT_EQ(m.target.size(), 4u);
  const Expr f = sym("f"), g = sym("g");
  EXPECT_TRUE(is_identically_zero(m.components[0] - (sym("x") - f / (f * f + g * g))).is_zero());
}

TEST(ParseTransformation, Identity) {
  const PointTransformation m = parse_transformation("map id { from: x, f, g; to: X, F, G; X = x; F = f; G = g; }");
  EXPECT_EQ(m.components, (std::vector<Expr>{sym("x"), sym("f"), sym("g")}));
}

TEST(ParseTransformation, DoubledCaretReportsColumn) {
  const std::string text = "map m { from: x, f, g; to: X, F, G; X = x; F = f^^2; G = g; }";
  const Position p = parse_failure(text);
  EXPECT_EQ(p.code, ErrorCode::SyntaxError);
  EXPECT_EQ(p.line, 1);
  EXPECT_EQ(p.column, static_cast<int>(text.find("^^") + 2));
}

TEST(ParseSolution, ComplexLineSplits) {
  const Solution s = parse_solution("solution { vars: x, y, f, g; complex: (x + %i*y)^2; }");
  const Expr x = sym("x"), y = sym("y");
  EXPECT_TRUE(is_identically_zero(s.values[0] - (x * x - y * y)).is_zero());
  EXPECT_TRUE(is_identically_zero(s.values[1] - 2 * x * y).is_zero());
  EXPECT_THROW(parse_solution("solution { vars: x, f, g; f = x; complex: x; }"), Error);
}

TEST(ParseFieldSet, NamedFields) {
  const FieldSet s = parse_field_set(testkit::fixture_text("lane_emden_generators.fields"));
  EXPECT_EQ(s.names, (std::vector<std::string>{"X1", "Y1", "X2", "Y2"}));
  EXPECT_EQ(s.components[3][3], sym("f"));
  EXPECT_THROW(parse_field_set("fields { vars: x, f; A = (1); }"), Error);
  EXPECT_THROW(parse_field_set("fields { vars: x, f; }"), Error);
  EXPECT_THROW(parse_field_set("fields { vars: x, f; A = (1, 0); A = (0, 1); }"), Error);
}

// Each malformed input marks its first offending token with '|'.
TEST(ParseErrors, PositionsPointAtFirstOffendingToken) {
  const std::vector<std::string> cases{
      "ode2 { vars: x, f, g; f'' = f +|; g'' = g; }",
      "ode2 { vars: x, f, g; f'' = (f|; g'' = g; }",
      "ode2 { vars: x, f, g; f'' = f |g'' = g; }",
      "ode2 {\n  vars: x, f, g;\n  f'' = f*|;\n  g'' = g;\n}",
      "ode2 { vars: x |f, g; f'' = f; g'' = g; }",
      "|ode3 { vars: x, f, g; f'' = f; g'' = g; }",
      "ode2 { vars: x, f, g; f'' = 2 *|* f; g'' = g; }",
      "ode2 { vars: x, f, g; f'' = sin(f, g|); g'' = g; }",
      "ode2 { vars: x, f, g; f'' = |foo(f); g'' = g; }",
      "ode2 { vars: x, f, g; f'' = f;\n g'' = g |}",
      "ode2 { vars: x, f, g; f'' = f; g'' = |@; }",
      "ode2 { vars: x, f, g; f'' = |k; g'' = g; }",
      "ode2 { vars: x, f, g; |g' = f; f'' = g; }",
      "ode2 { vars: x, f, g; f'' = f; |f'' = g; }",
      "pde2 { vars: x, y, f, g; f_xx - f_yy + 2*g_xy = |f_q; g_xx - g_yy - 2*f_xy = 0; }",
      "map m { from: x, f, g; to: X, F, G; X = x; F = f^|^2; G = g; }",
      "map m { from: x, f, g; to: X, F; X = x; F = f; |G = g; }",
      "ode2 { vars: x, f, g;\n\n   params: a = |;\n f'' = f; g'' = g; }",
  };
  for (const auto& marked : cases) {
    const auto at = marked.find('|');
    const std::string text = marked.substr(0, at) + marked.substr(at + 1);
    const auto nl = marked.rfind('\n', at);
    const int line = 1 + static_cast<int>(std::count(marked.begin(), marked.begin() + static_cast<long>(at), '\n'));
    const int column = static_cast<int>(nl == std::string::npos ? at + 1 : at - nl);
    const Position p = parse_failure(text);
    EXPECT_EQ(p.line, line) << text;
    EXPECT_EQ(p.column, column) << text;
  }
}

TEST(RoundTrip, WholeCorpus) {
  int checked = 0;
  for (const auto& entry : std::filesystem::directory_iterator(CLIN_TEST_FIXTURES)) {
    const auto ext = entry.path().extension().string();
    const std::string text = read_text_file(entry.path().string());
    SCOPED_TRACE(entry.path().filename().string());
    if (ext == ".eqs") {
      const SystemSpec a = parse_system(text);
      EXPECT_EQ(parse_system(print_system(a)), a);
    } else if (ext == ".map") {
      const PointTransformation a = parse_transformation(text);
      EXPECT_EQ(parse_transformation(print_transformation(a)), a);
    } else if (ext == ".sol") {
      const Solution a = parse_solution(text);
      EXPECT_EQ(parse_solution(print_solution(a)), a);
    } else if (ext == ".fields") {
      const FieldSet a = parse_field_set(text);
      EXPECT_EQ(parse_field_set(print_field_set(a)), a);
    } else {
      continue;
    }
    ++checked;
  }
  EXPECT_GE(checked, 40);
}
