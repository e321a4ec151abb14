#include <CLI11.hpp>

#include <iostream>

#include "clin/app.hpp"

using namespace clin::app;

int main(int argc, char** argv) {
  CLI::App cli{"Complex linearization checks for systems of two real ODEs or PDEs"};
  cli.require_subcommand(1);
  Options opt;

  double tolerance = 0.0;
  std::string format = "json", conditions = "both";
  std::vector<double> interval, box;
  std::vector<std::string> sets;
  double step = 0.0;
  int points = 0;
  std::string solution;

  auto* tol_opt = cli.add_option("--tolerance", tolerance, "Zero or residual tolerance")->check(CLI::PositiveNumber);
  cli.add_option("--samples", opt.samples, "Random samples per zero test")->check(CLI::PositiveNumber);
  cli.add_option("--seed", opt.seed, "Seed for every random choice");
  cli.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  cli.add_option("--conditions", conditions, "Condition set for check")
      ->check(CLI::IsMember({"printed", "complex", "both"}));
  cli.add_flag("--timing", opt.timing, "Include wall time in the report");
  cli.add_option("--init", opt.init, "Initial state f g f' g' (or f g)");
  auto* interval_opt = cli.add_option("--interval", interval, "Interval a b")->expected(2);
  auto* step_opt = cli.add_option("--step", step, "RK4 step")->check(CLI::PositiveNumber);
  auto* box_opt = cli.add_option("--box", box, "Box x0 x1 y0 y1")->expected(4);
  auto* points_opt = cli.add_option("--points", points, "Grid points (per side for boxes)")->check(CLI::PositiveNumber);
  auto* sol_opt = cli.add_option("--solution", solution, "Solution file for pde transforms");
  cli.add_option("--set", sets, "Override a parameter: name=expression");
  cli.add_option("--fixtures", opt.fixtures_dir, "Fixture directory for examples");

  std::string path, system, sol_path, map, target, subset = "all";
  auto* check = cli.add_subcommand("check", "Extract coefficients and test the linearizability conditions");
  check->add_option("system", path, "System file")->required();
  auto* vsol = cli.add_subcommand("verify-solution", "Residual of a closed-form solution on a grid");
  vsol->add_option("system", system)->required();
  vsol->add_option("solution", sol_path)->required();
  auto* vtr = cli.add_subcommand("verify-transform", "Push solutions through a point transformation");
  vtr->add_option("system", system)->required();
  vtr->add_option("map", map)->required();
  vtr->add_option("target", target, "free, constant or a target system file")->required();
  auto* ex = cli.add_subcommand("examples", "Run the bundled fixture corpus");
  ex->add_option("subset", subset, "all, an entry or a group");
  for (auto* sub : {check, vsol, vtr, ex}) sub->fallthrough();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*tol_opt) opt.tolerance = tolerance;
  opt.format = format == "text" ? Format::Text : Format::Json;
  opt.conditions = conditions == "printed"   ? ConditionSet::Printed
                   : conditions == "complex" ? ConditionSet::Complex
                                             : ConditionSet::Both;
  if (*interval_opt) opt.interval = std::array<double, 2>{interval[0], interval[1]};
  if (*box_opt) opt.box = std::array<double, 4>{box[0], box[1], box[2], box[3]};
  if (*step_opt) opt.step = step;
  if (*points_opt) opt.points = points;
  if (*sol_opt) opt.solution = solution;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "clin: --set expects name=expression, got " << s << "\n";
      return kExitUsage;
    }
    opt.set.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }

  Outcome out;
  try {
    if (*check) out = cmd_check(path, opt);
    else if (*vsol) out = cmd_verify_solution(system, sol_path, opt);
    else if (*vtr) out = cmd_verify_transform(system, map, target, opt);
    else out = cmd_examples(subset, opt);
  } catch (const std::exception& e) {
    std::cerr << "clin: " << e.what() << "\n";
    return kExitUsage;
  }

  if (out.report.contains("error")) {
    for (const auto& [stage, value] : out.report.items())
      if (value.is_object() && value.contains("error"))
        std::cerr << "clin: " << stage << ": " << value["error"].value("message", "") << "\n";
  }
  std::cout << render(out.report, opt.format);
  return out.exit_code;
}
