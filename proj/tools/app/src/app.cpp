#include "clin/app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "clin/error.hpp"
#include "clin/lincheck.hpp"
#include "clin/numverify.hpp"
#include "clin/symmetry.hpp"

#ifndef CLIN_VERSION
#define CLIN_VERSION "0.0.0"
#endif
#ifndef CLIN_FIXTURE_DIR
#define CLIN_FIXTURE_DIR "fixtures"
#endif

namespace clin::app {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string complex_string(Complex z) {
  return real_string(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + real_string(std::abs(z.imag())) + "i";
}

// Reads every input up front so the digest covers exactly what was analysed.
struct Inputs {
  std::vector<std::string> paths;
  std::vector<std::string> texts;

  const std::string& add(const std::string& path) {
    paths.push_back(path);
    texts.push_back(read_text_file(path));
    return texts.back();
  }
  std::string digest() const {
    std::string all;
    for (const auto& t : texts) all += sha256_hex(t);
    return sha256_hex(all);
  }
};

Json header(const std::string& command, const Options& options) {
  Json j;
  j["schema"] = 1;
  j["tool"] = "clin";
  j["version"] = CLIN_VERSION;
  j["command"] = command;
  j["seed"] = options.seed;
  return j;
}

void finish(Json& j, const Inputs& in, const Options& options, Clock::time_point start) {
  Json names = Json::array();
  for (const auto& p : in.paths) names.push_back(fs::path(p).filename().string());
  j["inputs"] = names;
  j["input_digest"] = in.digest();
  if (options.timing)
    j["wall_time_ms"] = real_string(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
}

Json error_json(const Error& e) {
  Json j;
  j["code"] = std::string(to_string(e.code()));
  j["message"] = e.what();
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    j["line"] = pe->line();
    j["column"] = pe->column();
  }
  return j;
}

bool is_usage_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UndeclaredSymbol:
    case ErrorCode::WrongLeftSide:
    case ErrorCode::DuplicateEquation:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return dynamic_cast<const ParseError*>(&e) != nullptr;
  }
}

ZeroTestOptions zero_options(const Options& o) {
  ZeroTestOptions z;
  z.samples = o.samples;
  z.seed = o.seed;
  if (o.tolerance) z.tolerance = *o.tolerance;
  return z;
}

Bindings overrides(const Options& o) {
  Bindings b;
  for (const auto& [name, text] : o.set) b.insert_or_assign(name, parse_expression(text));
  return b;
}

Json verdict_json(const ZeroVerdict& v) {
  Json j;
  j["verdict"] = std::string(to_string(v.kind));
  j["exact"] = v.exact;
  j["valid_samples"] = v.valid_samples;
  j["max_magnitude"] = real_string(v.max_magnitude);
  if (v.is_nonzero()) {
    Json w;
    for (const auto& [k, z] : v.witness) w[k] = complex_string(z);
    j["witness"] = w;
    j["witness_value"] = complex_string(v.witness_value);
  }
  return j;
}

Json condition_json(const ConditionReport& r) {
  Json j;
  j["verdict"] = std::string(to_string(r.overall));
  Json list = Json::array();
  for (const auto& c : r.conditions) {
    Json item;
    item["name"] = c.name;
    item.update(verdict_json(c.verdict));
    list.push_back(item);
  }
  j["residuals"] = list;
  return j;
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::Linearizable: return kExitPass;
    case Verdict::NotLinearizable: return kExitFail;
    case Verdict::Indeterminate: return kExitIndeterminate;
  }
  return kExitIndeterminate;
}

Json residual_json(const ResidualReport& r) {
  Json j;
  j["grid"] = r.grid;
  j["tolerance"] = real_string(r.tolerance);
  j["points"] = r.points;
  j["pass"] = r.pass;
  Json m;
  for (std::size_t k = 0; k < r.labels.size(); ++k) m[r.labels[k]] = real_string(r.max_residual[k]);
  j["max_residual"] = m;
  Json ex = Json::array();
  for (const auto& e : r.excluded) {
    Json at = Json::array();
    for (double v : e.at) at.push_back(real_string(v));
    ex.push_back(Json{{"at", at}, {"reason", e.reason}});
  }
  j["excluded"] = ex;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

// Runs `body`, mapping library errors onto the report and exit code.
template <class Body>
Outcome guarded(Json report, const Options& options, Inputs& in, const std::string& stage, Body body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out.exit_code = body(report, in);
  } catch (const Error& e) {
    report[stage] = Json{{"error", error_json(e)}};
    report["verdict"] = "error";
    report["error"] = std::string(to_string(e.code()));
    out.exit_code = is_usage_error(e) ? kExitUsage : kExitIndeterminate;
  }
  finish(report, in, options, start);
  out.report = std::move(report);
  return out;
}

}  // namespace

std::string real_string(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string default_fixtures_dir() { return CLIN_FIXTURE_DIR; }

Outcome cmd_check(const std::string& path, const Options& options) {
  Inputs in;
  return guarded(header("check", options), options, in, "parse", [&](Json& report, Inputs& inputs) {
    const SystemSpec sys = parse_system(inputs.add(path));
    report["parse"] = Json{{"name", sys.name},
                           {"kind", std::string(to_string(sys.kind))},
                           {"equations", sys.equations.size()},
                           {"constraints", sys.constraints.size()}};

    const ZeroTestOptions zo = zero_options(options);
    CubicCoefficients c;
    try {
      c = extract_coeffs(sys, zo);
    } catch (const Error& e) {
      if (is_usage_error(e) && e.code() != ErrorCode::InvalidArgument) throw;
      report["extraction"] = Json{{"error", error_json(e)}};
      report["verdict"] = "indeterminate";
      report["error"] = std::string(to_string(e.code()));
      return kExitIndeterminate;
    }
    Json coeffs;
    const std::array<const char*, 8> names{"A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2"};
    const auto all = c.all();
    for (std::size_t k = 0; k < 8; ++k) coeffs[names[k]] = to_string(all[k]);
    report["extraction"] = Json{{"slopes", c.slopes}, {"coefficients", coeffs}};

    Json conds;
    std::optional<Verdict> complex_v, printed_v;
    if (options.conditions != ConditionSet::Printed) {
      auto r = check_scalar_lie(c, zo);
      complex_v = r.overall;
      conds["complex"] = condition_json(r);
    }
    if (options.conditions != ConditionSet::Complex) {
      auto r = c.pde ? check_pde_conditions(c, zo) : check_ode_conditions(c, zo);
      printed_v = r.overall;
      conds["printed"] = condition_json(r);
    }
    if (complex_v && printed_v) conds["agree"] = *complex_v == *printed_v;
    report["conditions"] = conds;
    const Verdict v = complex_v ? *complex_v : *printed_v;
    report["verdict"] = std::string(to_string(v));
    return exit_for(v);
  });
}

Outcome cmd_verify_solution(const std::string& system, const std::string& solution, const Options& options) {
  Inputs in;
  return guarded(header("verify-solution", options), options, in, "residual", [&](Json& report, Inputs& inputs) {
    const SystemSpec sys = parse_system(inputs.add(system));
    const Solution sol = parse_solution(inputs.add(solution));
    const Bindings extra = overrides(options);
    ResidualReport r;
    if (is_ode(sys.kind)) {
      Grid1D g;
      if (options.interval) std::tie(g.a, g.b) = std::pair{(*options.interval)[0], (*options.interval)[1]};
      if (options.points) g.n = *options.points;
      r = residual_ode(sys, sol, g, options.tolerance.value_or(1e-8), extra);
    } else {
      Box b;
      if (options.box) {
        const auto& v = *options.box;
        b.x0 = v[0], b.x1 = v[1], b.y0 = v[2], b.y1 = v[3];
      }
      if (options.points) b.n = *options.points;
      r = residual_pde(sys, sol, b, options.tolerance.value_or(1e-9), extra);
    }
    report["residual"] = residual_json(r);
    report["verdict"] = r.pass ? "pass" : "fail";
    return r.pass ? kExitPass : kExitFail;
  });
}

Outcome cmd_verify_transform(const std::string& system, const std::string& map, const std::string& target,
                             const Options& options) {
  Inputs in;
  return guarded(header("verify-transform", options), options, in, "transform", [&](Json& report, Inputs& inputs) {
    const SystemSpec sys = parse_system(inputs.add(system));
    const PointTransformation pt = parse_transformation(inputs.add(map));
    const Bindings extra = overrides(options);
    ResidualReport r;
    if (is_ode(sys.kind)) {
      OdeTarget t;
      double tol = 1e-6;
      if (target == "free") {
        t.kind = TargetKind::FreeParticle;
      } else if (target == "constant") {
        t.kind = TargetKind::Constant;
        tol = 1e-8;
      } else {
        t.kind = TargetKind::Linear;
        t.system = parse_system(inputs.add(target));
      }
      const std::size_t need = order(sys.kind) == 2 ? 4 : 2;
      if (options.init.size() != need)
        throw Error(ErrorCode::InvalidArgument, "--init needs " + std::to_string(need) + " values for " +
                                                    std::string(to_string(sys.kind)));
      std::array<double, 4> init{};
      std::copy(options.init.begin(), options.init.end(), init.begin());
      const auto iv = options.interval.value_or(std::array<double, 2>{0.0, 1.0});
      const Trajectory traj = rk4_integrate(sys, init, iv[0], iv[1], options.step.value_or(1e-3), extra);
      report["trajectory"] = Json{{"method", traj.method},
                                  {"step", real_string(traj.step)},
                                  {"nodes", traj.x.size()},
                                  {"truncated", traj.truncated}};
      r = verify_transformation_ode(sys, pt, t, traj, options.tolerance.value_or(tol), extra);
    } else {
      if (!options.solution) throw Error(ErrorCode::InvalidArgument, "pde transforms need --solution");
      if (target == "free" || target == "constant")
        throw Error(ErrorCode::InvalidArgument, "pde transforms need a target system file");
      const SystemSpec ts = parse_system(inputs.add(target));
      const Solution sol = parse_solution(inputs.add(*options.solution));
      Box b;
      if (options.box) {
        const auto& v = *options.box;
        b.x0 = v[0], b.x1 = v[1], b.y0 = v[2], b.y1 = v[3];
      }
      r = verify_transformation_pde(sys, pt, ts, sol, b, options.tolerance.value_or(1e-6), extra);
    }
    report["transform"] = residual_json(r);
    report["verdict"] = r.pass ? "pass" : "fail";
    return r.pass ? kExitPass : kExitFail;
  });
}

namespace {

std::string verdict_of(const Json& report) {
  if (report.contains("error")) return "error:" + report["error"].get<std::string>();
  return report.value("verdict", "error");
}

Json run_entry(const Json& e, const fs::path& dir, const Options& base) {
  auto file = [&](const char* key) { return (dir / e.at(key).get<std::string>()).string(); };
  Options o;
  o.samples = base.samples;
  o.seed = base.seed;
  const std::string kind = e.at("kind");
  Json observed;
  Json detail;

  if (kind == "check") {
    Outcome out = cmd_check(file("system"), o);
    const Json& r = out.report;
    if (r.contains("error")) {
      observed = Json{{"error", r["error"]}};
    } else {
      observed["complex"] = r["conditions"]["complex"]["verdict"];
      observed["printed"] = r["conditions"]["printed"]["verdict"];
      for (const char* route : {"complex", "printed"}) {
        Json bad = Json::array();
        for (const auto& c : r["conditions"][route]["residuals"])
          if (c["verdict"] != std::string(to_string(ZeroVerdict::Kind::Zero))) bad.push_back(c["name"]);
        if (!bad.empty()) detail[std::string(route) + "_nonzero"] = bad;
      }
    }
  } else if (kind == "solution" || kind == "transform-ode" || kind == "transform-pde") {
    if (e.contains("interval")) o.interval = e["interval"].get<std::array<double, 2>>();
    if (e.contains("box")) o.box = e["box"].get<std::array<double, 4>>();
    if (e.contains("points")) o.points = e["points"].get<int>();
    if (e.contains("init")) o.init = e["init"].get<std::vector<double>>();
    if (e.contains("step")) o.step = e["step"].get<double>();
    if (e.contains("solution")) o.solution = file("solution");
    Outcome out;
    if (kind == "solution") {
      out = cmd_verify_solution(file("system"), file("solution"), o);
    } else {
      const std::string target = e.at("target");
      const bool builtin = target == "free" || target == "constant";
      out = cmd_verify_transform(file("system"), file("map"), builtin ? target : file("target"), o);
    }
    observed = verdict_of(out.report);
    const char* stage = kind == "solution" ? "residual" : "transform";
    if (out.report.contains(stage) && out.report[stage].contains("max_residual"))
      detail["max_residual"] = out.report[stage]["max_residual"];
  } else if (kind == "generators") {
    const FieldSet set = parse_field_set(read_text_file(file("fields")));
    const auto q = e.at("quadruple").get<std::vector<std::string>>();
    if (q.size() != 4) throw Error(ErrorCode::InvalidArgument, "quadruple needs four field names");
    ZeroTestOptions zo;
    zo.samples = o.samples;
    zo.seed = o.seed;
    auto r = check_theorem2(field_named(set, q[0]), field_named(set, q[1]), field_named(set, q[2]),
                            field_named(set, q[3]), zo);
    const bool zero = r.commutator_verdicts[0].is_zero() && r.commutator_verdicts[1].is_zero();
    const bool nonzero = r.commutator_verdicts[0].is_nonzero() || r.commutator_verdicts[1].is_nonzero();
    observed["proportionality"] = std::string(to_string(r.proportionality));
    observed["commutators"] = zero ? "zero" : nonzero ? "nonzero" : "unknown";
    if (!r.inconsistent.empty()) detail["inconsistent"] = r.inconsistent;
    detail["commutators"] = Json::array({to_string(r.commutators[0]), to_string(r.commutators[1])});
  } else if (kind == "bracket") {
    const FieldSet set = parse_field_set(read_text_file(file("fields")));
    ZeroTestOptions zo;
    zo.samples = o.samples;
    zo.seed = o.seed;
    const VectorField b = lie_bracket(field_named(set, e.at("left")), field_named(set, e.at("right")));
    detail["bracket"] = to_string(b);
    observed = "other";
    if (is_zero_field(b, zo).is_zero()) {
      observed = "zero";
    } else {
      for (const auto& name : set.names)
        if (is_zero_field(b - field_named(set, name), zo).is_zero()) {
          observed = name;
          break;
        }
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown manifest kind " + kind);
  }

  Json out;
  out["name"] = e.at("name");
  out["group"] = e.at("group");
  out["kind"] = kind;
  out["expected"] = e.at("expect");
  out["observed"] = observed;
  const bool match = observed == e.at("expect");
  out["status"] = !match ? "FAIL" : e.contains("finding") ? "WARN" : "PASS";
  if (e.contains("finding")) out["finding"] = e["finding"];
  if (!detail.is_null()) out["detail"] = detail;
  return out;
}

}  // namespace

Outcome cmd_examples(const std::string& subset, const Options& options) {
  Inputs in;
  const fs::path dir = options.fixtures_dir.empty() ? default_fixtures_dir() : options.fixtures_dir;
  return guarded(header("examples", options), options, in, "manifest", [&](Json& report, Inputs& inputs) {
    const Json manifest = Json::parse(inputs.add((dir / "manifest.json").string()));
    std::vector<Json> chosen;
    for (const auto& e : manifest.at("entries"))
      if (subset == "all" || e.at("name") == subset || e.at("group") == subset) chosen.push_back(e);
    if (chosen.empty()) throw Error(ErrorCode::InvalidArgument, "no manifest entry or group named " + subset);
    std::sort(chosen.begin(), chosen.end(),
              [](const Json& a, const Json& b) { return a.at("name").get<std::string>() < b.at("name").get<std::string>(); });

    report["subset"] = subset;
    Json results = Json::array();
    int pass = 0, warn = 0, fail = 0;
    for (const auto& e : chosen) {
      Json r;
      try {
        r = run_entry(e, dir, options);
      } catch (const std::exception& ex) {
        r = Json{{"name", e.value("name", "?")}, {"group", e.value("group", "?")}, {"status", "FAIL"}, {"error", ex.what()}};
      }
      const std::string s = r["status"];
      (s == "PASS" ? pass : s == "WARN" ? warn : fail)++;
      results.push_back(std::move(r));
    }
    report["entries"] = results;
    report["summary"] = Json{{"pass", pass}, {"warn", warn}, {"fail", fail}};
    report["verdict"] = fail == 0 ? "pass" : "fail";
    return fail == 0 ? kExitPass : kExitFail;
  });
}

namespace {

std::string scalar_text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

void render_text(std::ostringstream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_object()) {
      os << pad << it.key() << ":\n";
      render_text(os, v, indent + 2);
    } else if (v.is_array() && std::any_of(v.begin(), v.end(), [](const Json& x) { return x.is_structured(); })) {
      os << pad << it.key() << ":\n";
      for (const auto& item : v) {
        os << pad << "  -\n";
        if (item.is_object()) render_text(os, item, indent + 4);
        else os << pad << "    " << scalar_text(item) << "\n";
      }
    } else if (v.is_array()) {
      os << pad << it.key() << ":";
      for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : " ") << scalar_text(v[k]);
      os << "\n";
    } else {
      os << pad << it.key() << ": " << scalar_text(v) << "\n";
    }
  }
}

}  // namespace

std::string render(const Json& report, Format format) {
  if (format == Format::Json) return report.dump(2) + "\n";
  std::ostringstream os;
  if (report.contains("entries")) {
    for (const auto& e : report["entries"]) {
      os << e.value("status", "?") << "  " << e.value("name", "?");
      if (e.contains("finding")) os << "  (" << e["finding"].get<std::string>() << ")";
      if (e.contains("error")) os << "  " << e["error"].get<std::string>();
      os << "\n";
    }
    const Json& s = report["summary"];
    os << "pass " << s["pass"].dump() << ", warn " << s["warn"].dump() << ", fail " << s["fail"].dump() << "\n";
    return os.str();
  }
  render_text(os, report, 0);
  return os.str();
}

}  // namespace clin::app
