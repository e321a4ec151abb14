#include <gtest/gtest.h>

#include <cmath>

#include "clin/error.hpp"
#include "clin/numverify.hpp"
#include "testkit.hpp"

using namespace clin;
using testkit::sym;

namespace {

SystemSpec sys(const std::string& name) { return parse_system(testkit::fixture_text(name)); }
PointTransformation map_of(const std::string& name) { return parse_transformation(testkit::fixture_text(name)); }
Solution sol(const std::string& name) { return parse_solution(testkit::fixture_text(name)); }

template <class F>
ErrorCode error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

double riccati_error(double step) {
  const Trajectory t = rk4_integrate(sys("riccati.eqs"), {1, 0, 0, 0}, 0, 1, step);
  double err = 0;
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    err = std::max(err, std::abs(t.states[k][0] - 1 / (t.x[k] + 1)));
    err = std::max(err, std::abs(t.states[k][1]));
  }
  return err;
}

}  // namespace

TEST(Rk4, FreeParticleIsExactlyLinear) {
  const Trajectory t = rk4_integrate(sys("free.eqs"), {0, 0, 1, 2}, 0, 1, 0.01);
  ASSERT_EQ(t.x.size(), 101u);
  EXPECT_FALSE(t.truncated);
  EXPECT_EQ(t.method, "rk4");
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    EXPECT_NEAR(t.states[k][0], t.x[k], 1e-12);
    EXPECT_NEAR(t.states[k][1], 2 * t.x[k], 1e-12);
  }
  EXPECT_DOUBLE_EQ(t.x.back(), 1.0);
}

TEST(Rk4, RiccatiMatchesClosedForm) { EXPECT_LT(riccati_error(1e-3), 1e-9); }

// Complex constants fitted from initial data: a = -u0/(u0^2 + u0'), b = a/u0.
TEST(Rk4, EmdenMatchesFittedClosedForm) {
  const Complex u0(0.5, 0.2), v0(0.1, -0.3);
  const Trajectory t = rk4_integrate(sys("emden.eqs"), {u0.real(), u0.imag(), v0.real(), v0.imag()}, 0, 1, 1e-3);
  const Complex a = -u0 / (u0 * u0 + v0), b = a / u0;
  double err = 0;
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    const double x = t.x[k];
    const Complex u = 2.0 * (x - a) / (x * x - 2.0 * a * x - 2.0 * b);
    err = std::max(err, std::abs(u - Complex(t.states[k][0], t.states[k][1])));
  }
  EXPECT_LT(err, 1e-6);
}

TEST(Rk4, ImmediateBlowupAndTruncation) {
  const SystemSpec s = parse_system("ode1 { vars: x, f, g; f' = 1/f; g' = 0; }");
  EXPECT_EQ(error_of([&] { rk4_integrate(s, {0, 0, 0, 0}, 0, 1, 0.1); }), ErrorCode::ImmediateBlowup);
  // The right side is undefined at x = 1, a stage node for step 1/4.
  const SystemSpec blow = parse_system("ode1 { vars: x, f, g; f' = ln(1 - x); g' = 0; }");
  const Trajectory t = rk4_integrate(blow, {1, 0, 0, 0}, 0, 2, 0.25);
  EXPECT_TRUE(t.truncated);
  EXPECT_EQ(t.x.back(), 0.75);
  for (const auto& s : t.states) EXPECT_TRUE(std::isfinite(s[0]));
}

TEST(Rk4, BadArguments) {
  EXPECT_THROW(rk4_integrate(sys("free.eqs"), {0, 0, 0, 0}, 0, 1, 0), Error);
  EXPECT_THROW(rk4_integrate(sys("zero_pde.eqs"), {0, 0, 0, 0}, 0, 1, 0.1), Error);
}

TEST(Rk4Properties, FourthOrderOnRiccati) {
  const double ratio = riccati_error(0.02) / riccati_error(0.01);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Residual, OdeExamples) {
  EXPECT_LT(residual_ode(sys("emden.eqs"), sol("emden.sol"), {}).max(), 1e-8);
  EXPECT_LT(residual_ode(sys("emden.eqs"), sol("emden_complex.sol"), {}).max(), 1e-8);
  EXPECT_TRUE(residual_ode(sys("newtonian_unit.eqs"), sol("newtonian_unit.sol"), {}).pass);
  const Solution line = parse_solution("solution { vars: x, f, g; f = x; g = 0; }");
  const ResidualReport r = residual_ode(sys("free.eqs"), line, {});
  EXPECT_EQ(r.max(), 0.0);
  EXPECT_EQ(r.points, 101);
  EXPECT_EQ(r.labels, (std::vector<std::string>{"equation.1", "equation.2"}));
}

TEST(Residual, WrongSolutionFails) {
  const Solution wrong = parse_solution("solution { vars: x, f, g; f = x^2; g = 0; }");
  const ResidualReport r = residual_ode(sys("free.eqs"), wrong, {});
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max(), 2.0, 1e-12);
}

TEST(Residual, SingularPointsAreExcluded) {
  // The residual does not cancel symbolically, so x = 1/2 has to be dropped.
  const Solution pole = parse_solution("solution { vars: x, f, g; f = ln(x - 1/2); g = 0; }");
  const SystemSpec s = parse_system("ode1 { vars: x, f, g; f' = exp(-f); g' = 0; }");
  const ResidualReport r = residual_ode(s, pole, {0, 1, 101});
  EXPECT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.points, 100);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(error_of([&] { residual_ode(s, pole, {0.5, 0.5, 1}); }), ErrorCode::AllPointsExcluded);
}

TEST(Residual, PdeExamples) {
  const ResidualReport e = residual_pde(sys("anharmonic_pde_free.eqs"), sol("exp_z.sol"), {});
  EXPECT_LT(e.max(), 1e-9);
  const ResidualReport z = residual_pde(sys("zero_pde.eqs"), sol("identity_z.sol"), {});
  EXPECT_EQ(z.max(), 0.0);
  const ResidualReport p = residual_pde(sys("cr_riccati.eqs"), sol("pole.sol"), {});
  EXPECT_LT(p.max(), 1e-9);
  EXPECT_NE(std::find(p.labels.begin(), p.labels.end(), "cauchy-riemann.1"), p.labels.end());
}

TEST(Residual, NonAnalyticPairFailsCauchyRiemann) {
  const Solution conj = parse_solution("solution { vars: x, y, f, g; f = x; g = -y; }");
  const ResidualReport r = residual_pde(sys("zero_pde.eqs"), conj, {});
  EXPECT_FALSE(r.pass);
}

TEST(TransformOde, RiccatiImageIsConstant) {
  const SystemSpec s = sys("riccati.eqs");
  const Trajectory t = rk4_integrate(s, {1, 0, 0, 0}, 0, 1, 1e-3);
  const ResidualReport r = verify_transformation_ode(s, map_of("riccati.map"), {TargetKind::Constant, {}}, t, 1e-8);
  EXPECT_TRUE(r.pass) << r.max();
}

TEST(TransformOde, EmdenImageIsCollinear) {
  const SystemSpec s = sys("emden.eqs");
  const Trajectory t = rk4_integrate(s, {0.5, 0.2, 0.1, -0.3}, 0, 1, 1e-3);
  const ResidualReport r = verify_transformation_ode(s, map_of("emden_complex.map"), {}, t);
  EXPECT_LT(r.max(), 1e-6);
}

TEST(TransformOde, IdentityOnFreeParticle) {
  const SystemSpec s = sys("free.eqs");
  const Trajectory t = rk4_integrate(s, {0, 0, 1, 2}, 0, 1, 1e-2);
  const ResidualReport r = verify_transformation_ode(s, map_of("identity_ode.map"), {}, t);
  EXPECT_LT(r.max(), 1e-10);
}

TEST(TransformOde, SoundOnPerturbedEmden) {
  const SystemSpec s = sys("emden_perturbed.eqs");
  const Trajectory t = rk4_integrate(s, {0.5, 0.2, 0.1, -0.3}, 0, 1, 1e-3);
  const ResidualReport r = verify_transformation_ode(s, map_of("emden_complex.map"), {}, t);
  EXPECT_GT(r.max(), 1e-2);
  EXPECT_FALSE(r.pass);
}

TEST(TransformOde, LinearTarget) {
  const SystemSpec s = sys("anharmonic_quadratic.eqs");
  const Trajectory t = rk4_integrate(s, {1, 0.3, 0.2, 0.1}, 1, 2, 1e-3);
  const OdeTarget good{TargetKind::Linear, sys("anharmonic_chi_target.eqs")};
  EXPECT_TRUE(verify_transformation_ode(s, map_of("anharmonic_chi.map"), good, t).pass);
  const OdeTarget printed{TargetKind::Linear, sys("anharmonic_chi_target_printed.eqs")};
  EXPECT_FALSE(verify_transformation_ode(s, map_of("anharmonic_chi.map"), printed, t).pass);
}

TEST(TransformOde, Errors) {
  const SystemSpec s = sys("free.eqs");
  const Trajectory t = rk4_integrate(s, {0, 0, 1, 2}, 0, 1, 1e-2);
  const PointTransformation collapse =
      parse_transformation("map c { from: x, f, g; to: X, F, G; X = 0; F = 0; G = 0; }");
  EXPECT_EQ(error_of([&] { verify_transformation_ode(s, collapse, {}, t); }), ErrorCode::DegenerateImage);
  const Trajectory shortt = rk4_integrate(s, {0, 0, 1, 2}, 0, 0.3, 0.1);
  EXPECT_EQ(error_of([&] { verify_transformation_ode(s, map_of("identity_ode.map"), {}, shortt); }),
            ErrorCode::TooFewPoints);
}

TEST(Newton, IdentityReturnsTargets) {
  const PlanarMap id{sym("x"), sym("y")};
  const std::vector<std::array<double, 2>> targets{{0.3, 0.4}, {-1, 2}, {5, -7}};
  const auto got = newton_invert(id, targets, {0, 0});
  for (std::size_t k = 0; k < targets.size(); ++k) {
    EXPECT_NEAR(got[k][0], targets[k][0], 1e-14);
    EXPECT_NEAR(got[k][1], targets[k][1], 1e-14);
  }
}

// (x/(x^2+y^2), -y/(x^2+y^2)) is Z = 1/z; the inverse is again 1/Z.
TEST(Newton, ComplexInversionRoundTrip) {
  const Expr x = sym("x"), y = sym("y"), r = x * x + y * y;
  const PlanarMap inv{x / r, -y / r};
  std::vector<std::array<double, 2>> targets;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) targets.push_back({0.5 + 0.05 * i, 0.5 + 0.05 * j});
  const Complex start = 1.0 / Complex(targets[0][0], targets[0][1]);
  const auto got = newton_invert(inv, targets, {start.real() * 1.01, start.imag() * 0.99});
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const Complex expected = 1.0 / Complex(targets[k][0], targets[k][1]);
    EXPECT_LT(std::abs(Complex(got[k][0], got[k][1]) - expected), 1e-10);
  }
}

TEST(Newton, MixedMapRoundTrip) {
  // X = 2f - x^2 + y^2, Y = 2g - 2xy with f + i g = z^2/2 + z + 1.
  const Expr x = sym("x"), y = sym("y");
  const Expr f = (x * x - y * y) / Expr(2) + x + 1, g = x * y + y;
  const PlanarMap m{2 * f - x * x + y * y, 2 * g - 2 * x * y};
  Evaluator ex(m.X, {"x", "y"}), ey(m.Y, {"x", "y"});
  testkit::Gen gen(3);
  std::vector<std::array<double, 2>> pts, targets;
  for (int k = 0; k < 20; ++k) {
    pts.push_back({gen.real(0.5, 1), gen.real(0.5, 1)});
    targets.push_back({ex.real(pts.back()), ey.real(pts.back())});
  }
  const auto got = newton_invert(m, targets, {0.75, 0.75});
  for (std::size_t k = 0; k < pts.size(); ++k) {
    EXPECT_NEAR(got[k][0], pts[k][0], 1e-10);
    EXPECT_NEAR(got[k][1], pts[k][1], 1e-10);
  }
}

TEST(Newton, Errors) {
  const Expr x = sym("x"), y = sym("y");
  EXPECT_EQ(error_of([&] { newton_invert({x + y, x + y}, {{1, 2}}, {0, 0}); }), ErrorCode::SingularJacobian);
  EXPECT_EQ(error_of([&] { newton_invert({x * x + 1, y}, {{0, 0}}, {0.7, 0}); }), ErrorCode::NoConvergence);
}

TEST(TransformPde, InversionToCauchyRiemann) {
  const ResidualReport r = verify_transformation_pde(sys("cr_riccati.eqs"), map_of("cr_inversion.map"),
                                                     sys("cauchy_riemann.eqs"), sol("pole.sol"), {});
  EXPECT_LT(r.max(), 1e-7);
  EXPECT_FALSE(r.notes.empty());
}

TEST(TransformPde, IdentityOnZeroSystem) {
  const ResidualReport r = verify_transformation_pde(sys("zero_pde.eqs"), map_of("identity_pde.map"),
                                                     sys("zero_pde_target.eqs"), sol("identity_z.sol"), {});
  EXPECT_LT(r.max(), 1e-10);
}

TEST(TransformPde, ExponentialThroughInversion) {
  const ResidualReport r =
      verify_transformation_pde(sys("anharmonic_pde_free.eqs"), map_of("anharmonic_pde.map"),
                                sys("zero_pde_target.eqs"), sol("exp_z.sol"), {0.5, 1, 0.5, 1, 21});
  EXPECT_LT(r.max(), 1e-6);
}

TEST(TransformPde, PrintedLaneEmdenMapFails) {
  const Box box{0.5, 1, 0.5, 1, 21};
  const SystemSpec s = sys("lane_emden_pde.eqs");
  EXPECT_TRUE(verify_transformation_pde(s, map_of("lane_emden.map"), sys("zero_pde_target.eqs"),
                                        sol("lane_emden_pde.sol"), box)
                  .pass);
  EXPECT_FALSE(verify_transformation_pde(s, map_of("lane_emden_printed.map"), sys("zero_pde_target.eqs"),
                                         sol("lane_emden_pde.sol"), box)
                   .pass);
}

TEST(Fornberg, ExactOnPolynomials) {
  const std::vector<Complex> nodes{-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto w = fornberg_weights(0.3, nodes, 2);
  ASSERT_EQ(w.size(), 3u);
  for (int deg = 0; deg <= 4; ++deg) {
    Complex d0 = 0, d1 = 0, d2 = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const Complex v = std::pow(nodes[k], deg);
      d0 += w[0][k] * v;
      d1 += w[1][k] * v;
      d2 += w[2][k] * v;
    }
    const double z = 0.3;
    EXPECT_NEAR(std::abs(d0 - std::pow(z, deg)), 0, 1e-12);
    EXPECT_NEAR(std::abs(d1 - (deg > 0 ? deg * std::pow(z, deg - 1) : 0.0)), 0, 1e-12);
    EXPECT_NEAR(std::abs(d2 - (deg > 1 ? deg * (deg - 1) * std::pow(z, deg - 2) : 0.0)), 0, 1e-12);
  }
}

TEST(Fornberg, ComplexNodes) {
  const std::vector<Complex> nodes{{0, 0}, {1, 1}, {2, 0.5}};
  const auto w = fornberg_weights({1, 0}, nodes, 1);
  Complex d = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) d += w[1][k] * nodes[k] * nodes[k];
  EXPECT_LT(std::abs(d - 2.0), 1e-12);
}
