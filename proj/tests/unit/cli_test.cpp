#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <regex>

#include "clin/app.hpp"
#include "testkit.hpp"

using namespace clin::app;

namespace {

Options opts() {
  Options o;
  o.fixtures_dir = CLIN_TEST_FIXTURES;
  return o;
}

std::string fx(const std::string& name) { return testkit::fixture(name); }

// Every real in a report is a decimal string in %.6e form.
void expect_decimal_strings(const Json& j, const std::string& key = "") {
  static const std::regex decimal(R"(-?\d\.\d{6}e[+-]\d{2}([+-]\d\.\d{6}e[+-]\d{2}i)?)");
  if (j.is_number_float()) ADD_FAILURE() << "raw float under " << key;
  if (j.is_object())
    for (auto it = j.begin(); it != j.end(); ++it) expect_decimal_strings(it.value(), it.key());
  if (j.is_array())
    for (const auto& v : j) expect_decimal_strings(v, key);
  if (j.is_string() && (key == "max_magnitude" || key == "tolerance"))
    EXPECT_TRUE(std::regex_match(j.get<std::string>(), decimal)) << key << " = " << j;
}

}  // namespace

TEST(Cli, CheckExitCodes) {
  EXPECT_EQ(cmd_check(fx("emden.eqs"), opts()).exit_code, kExitPass);
  EXPECT_EQ(cmd_check(fx("free.eqs"), opts()).exit_code, kExitPass);
  EXPECT_EQ(cmd_check(fx("emden_perturbed.eqs"), opts()).exit_code, kExitFail);
  EXPECT_EQ(cmd_check(fx("cr_riccati.eqs"), opts()).exit_code, kExitIndeterminate);
  EXPECT_EQ(cmd_check(fx("newtonian_unit_printed.eqs"), opts()).exit_code, kExitIndeterminate);
  EXPECT_EQ(cmd_check(fx("missing.eqs"), opts()).exit_code, kExitUsage);
}

TEST(Cli, ParseErrorIsUsage) {
  const std::string path = ::testing::TempDir() + "/broken.eqs";
  {
    std::ofstream out(path);
    out << "ode2 {\n  vars: x, f, g;\n  f'' = f +;\n  g'' = g;\n}\n";
  }
  const Outcome o = cmd_check(path, opts());
  EXPECT_EQ(o.exit_code, kExitUsage);
  EXPECT_EQ(o.report["error"], "SyntaxError");
  EXPECT_EQ(o.report["parse"]["error"]["line"], 3);
}

TEST(Cli, CheckReportSchema) {
  const Outcome o = cmd_check(fx("emden_perturbed.eqs"), opts());
  const Json& r = o.report;
  EXPECT_EQ(r["schema"], 1);
  EXPECT_EQ(r["tool"], "clin");
  EXPECT_EQ(r["command"], "check");
  EXPECT_EQ(r["seed"], 42);
  EXPECT_EQ(r["verdict"], "not-linearizable");
  EXPECT_EQ(r["input_digest"].get<std::string>().size(), 64u);
  EXPECT_FALSE(r.contains("wall_time_ms"));
  const Json& lie2 = r["conditions"]["complex"]["residuals"][2];
  EXPECT_EQ(lie2["name"], "lie.2.re");
  EXPECT_EQ(lie2["verdict"], "NonZero");
  EXPECT_TRUE(lie2.contains("witness"));
  EXPECT_TRUE(r["conditions"]["agree"].get<bool>());
  expect_decimal_strings(r);
}

TEST(Cli, ConditionSetSelection) {
  Options o = opts();
  o.conditions = ConditionSet::Printed;
  const Outcome printed = cmd_check(fx("emden.eqs"), o);
  EXPECT_FALSE(printed.report["conditions"].contains("complex"));
  EXPECT_EQ(printed.exit_code, kExitFail);
  o.conditions = ConditionSet::Complex;
  const Outcome complex = cmd_check(fx("emden.eqs"), o);
  EXPECT_FALSE(complex.report["conditions"].contains("printed"));
  EXPECT_EQ(complex.exit_code, kExitPass);
}

TEST(Cli, TimingOnlyWhenRequested) {
  Options o = opts();
  o.timing = true;
  EXPECT_TRUE(cmd_check(fx("free.eqs"), o).report.contains("wall_time_ms"));
}

TEST(Cli, Determinism) {
  EXPECT_EQ(render(cmd_check(fx("emden.eqs"), opts()).report, Format::Json),
            render(cmd_check(fx("emden.eqs"), opts()).report, Format::Json));
  Options other = opts();
  other.seed = 7;
  EXPECT_EQ(cmd_check(fx("emden.eqs"), other).report["seed"], 7);
}

TEST(Cli, VerifySolution) {
  const Outcome good = cmd_verify_solution(fx("emden.eqs"), fx("emden.sol"), opts());
  EXPECT_EQ(good.exit_code, kExitPass);
  EXPECT_EQ(good.report["residual"]["points"], 101);
  expect_decimal_strings(good.report);
  const Outcome printed =
      cmd_verify_solution(fx("newtonian_unit_printed.eqs"), fx("newtonian_unit_printed.sol"), opts());
  EXPECT_EQ(printed.exit_code, kExitFail);
  const Outcome pde = cmd_verify_solution(fx("anharmonic_pde_free.eqs"), fx("exp_z.sol"), opts());
  EXPECT_EQ(pde.exit_code, kExitPass);
}

TEST(Cli, SetOverridesParameters) {
  Options o = opts();
  o.set = {{"a1", "1/4"}, {"b2", "-1/3"}};
  EXPECT_EQ(cmd_verify_solution(fx("emden.eqs"), fx("emden_complex.sol"), o).exit_code, kExitPass);
  o.set = {{"a1", "1/4 +"}};
  EXPECT_EQ(cmd_verify_solution(fx("emden.eqs"), fx("emden_complex.sol"), o).exit_code, kExitUsage);
}

TEST(Cli, VerifyTransform) {
  Options o = opts();
  o.init = {0.5, 0.2, 0.1, -0.3};
  EXPECT_EQ(cmd_verify_transform(fx("emden.eqs"), fx("emden_complex.map"), "free", o).exit_code, kExitPass);
  EXPECT_EQ(cmd_verify_transform(fx("emden_perturbed.eqs"), fx("emden_complex.map"), "free", o).exit_code,
            kExitFail);
  o.init = {1, 0};
  EXPECT_EQ(cmd_verify_transform(fx("riccati.eqs"), fx("riccati.map"), "constant", o).exit_code, kExitPass);
  o.init = {1, 0, 0};
  EXPECT_EQ(cmd_verify_transform(fx("riccati.eqs"), fx("riccati.map"), "constant", o).exit_code, kExitUsage);
  Options p = opts();
  p.solution = fx("pole.sol");
  EXPECT_EQ(cmd_verify_transform(fx("cr_riccati.eqs"), fx("cr_inversion.map"), fx("cauchy_riemann.eqs"), p).exit_code,
            kExitPass);
}

TEST(Cli, ExamplesSubsets) {
  const Outcome emden = cmd_examples("emden", opts());
  EXPECT_EQ(emden.exit_code, kExitPass);
  for (const auto& e : emden.report["entries"]) EXPECT_NE(e["status"], "FAIL") << e["name"];

  const Outcome chi = cmd_examples("anharmonic-chi", opts());
  EXPECT_EQ(chi.exit_code, kExitPass);
  ASSERT_EQ(chi.report["entries"].size(), 4u);
  for (const auto& e : chi.report["entries"]) {
    EXPECT_EQ(e["status"], "WARN");
    EXPECT_TRUE(e.contains("finding"));
  }

  EXPECT_EQ(cmd_examples("no-such-entry", opts()).exit_code, kExitUsage);
}

TEST(Cli, ExamplesSingleEntryAndOrder) {
  const Outcome o = cmd_examples("riccati", opts());
  std::vector<std::string> names;
  for (const auto& e : o.report["entries"]) names.push_back(e["name"]);
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
  EXPECT_EQ(cmd_examples("riccati-constant", opts()).report["entries"].size(), 1u);
}

TEST(Cli, TextRender) {
  const std::string text = render(cmd_check(fx("free.eqs"), opts()).report, Format::Text);
  EXPECT_NE(text.find("verdict: linearizable"), std::string::npos) << text;
  EXPECT_EQ(text.find('{'), std::string::npos);
  EXPECT_EQ(real_string(0.5), "5.000000e-01");
}
