#include <benchmark/benchmark.h>

#include "clin/lincheck.hpp"
#include "clin/numverify.hpp"
#include "clin/symmetry.hpp"

using namespace clin;

namespace {

std::string fixture(const char* name) { return read_text_file(std::string(CLIN_BENCH_FIXTURES) + "/" + name); }

Expr sample_expression() {
  const Expr x = Expr::symbol("x"), f = Expr::symbol("f"), g = Expr::symbol("g");
  return exp(sin(x * f)) / (1 + g * g) + pow(f * f + g * g, Expr(Rational(-3, 2))) * ln(1 + x * x) +
         arctan2(g, f) * sqrt(x + 1);
}

void BM_Differentiate(benchmark::State& state) {
  const Expr e = sample_expression();
  for (auto _ : state) benchmark::DoNotOptimize(differentiate(differentiate(e, "f"), "x"));
}
BENCHMARK(BM_Differentiate);

void BM_Normalize(benchmark::State& state) {
  const Expr e = differentiate(differentiate(sample_expression(), "f"), "g");
  for (auto _ : state) benchmark::DoNotOptimize(normalize(e));
}
BENCHMARK(BM_Normalize);

void BM_ZeroTest(benchmark::State& state) {
  const Expr x = Expr::symbol("x"), f = Expr::symbol("f");
  // Not caught by expansion; decided by sampling.
  const Expr e = pow(sin(x + f), Expr(2)) + pow(cos(x + f), Expr(2)) - 1;
  ZeroTestOptions o;
  o.samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(is_identically_zero(e, {}, o));
}
BENCHMARK(BM_ZeroTest)->Arg(16)->Arg(64)->Arg(256);

void BM_Extract(benchmark::State& state) {
  const SystemSpec s = parse_system(fixture(state.range(0) ? "anharmonic.eqs" : "emden.eqs"));
  for (auto _ : state) benchmark::DoNotOptimize(extract_coeffs(s));
}
BENCHMARK(BM_Extract)->Arg(0)->Arg(1);

void BM_CheckLie(benchmark::State& state) {
  const CubicCoefficients c = extract_coeffs(parse_system(fixture("lane_emden_pde.eqs")));
  for (auto _ : state) benchmark::DoNotOptimize(check_scalar_lie(c));
}
BENCHMARK(BM_CheckLie);

void BM_DeriveRealConditions(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(derive_real_conditions(false, 10, 42));
}
BENCHMARK(BM_DeriveRealConditions)->Unit(benchmark::kMillisecond);

void BM_Rk4(benchmark::State& state) {
  const SystemSpec s = parse_system(fixture("emden.eqs"));
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rk4_integrate(s, {0.5, 0.2, 0.1, -0.3}, 0, 1, step));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rk4)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_VerifyPde(benchmark::State& state) {
  const SystemSpec src = parse_system(fixture("cr_riccati.eqs"));
  const SystemSpec tgt = parse_system(fixture("cauchy_riemann.eqs"));
  const PointTransformation m = parse_transformation(fixture("cr_inversion.map"));
  const Solution sol = parse_solution(fixture("pole.sol"));
  for (auto _ : state) benchmark::DoNotOptimize(verify_transformation_pde(src, m, tgt, sol, {}));
}
BENCHMARK(BM_VerifyPde)->Unit(benchmark::kMillisecond);

void BM_LieBracket(benchmark::State& state) {
  const FieldSet s = parse_field_set(fixture("lane_emden_generators.fields"));
  const auto fs = fields_of(s);
  for (auto _ : state) benchmark::DoNotOptimize(lie_bracket(fs[2], fs[3]));
}
BENCHMARK(BM_LieBracket);

}  // namespace

BENCHMARK_MAIN();
