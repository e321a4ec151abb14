#pragma once

// Command implementations behind the clin executable. Each command returns
// a report object plus the process exit code; rendering is separate so the
// acceptance suite can drive commands in-process.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace clin::app {

using Json = nlohmann::ordered_json;

enum class Format { Json, Text };
enum class ConditionSet { Printed, Complex, Both };

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitIndeterminate = 2;
inline constexpr int kExitUsage = 3;

struct Options {
  std::optional<double> tolerance;  // per-command default when unset
  int samples = 64;
  std::uint64_t seed = 42;
  Format format = Format::Json;
  ConditionSet conditions = ConditionSet::Both;
  bool timing = false;

  // numeric verification
  std::vector<double> init;
  std::optional<std::array<double, 2>> interval;
  std::optional<double> step;
  std::optional<std::array<double, 4>> box;
  std::optional<int> points;
  std::optional<std::string> solution;
  std::vector<std::pair<std::string, std::string>> set;  // param overrides, as expressions

  std::string fixtures_dir;  // empty: the installed corpus
};

struct Outcome {
  Json report;
  int exit_code = kExitUsage;
};

Outcome cmd_check(const std::string& path, const Options& options);
Outcome cmd_verify_solution(const std::string& system, const std::string& solution, const Options& options);
/// `target` is "free", "constant" or a path to a target system.
Outcome cmd_verify_transform(const std::string& system, const std::string& map, const std::string& target,
                             const Options& options);
/// `subset` is "all", an entry name or a group name from the manifest.
Outcome cmd_examples(const std::string& subset, const Options& options);

std::string render(const Json& report, Format format);

/// Decimal string used for every real in a report.
std::string real_string(double v);

std::string default_fixtures_dir();

}  // namespace clin::app
