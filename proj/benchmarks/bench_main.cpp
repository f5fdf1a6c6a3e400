#include <benchmark/benchmark.h>

#include <cmath>

#include "philab/inequality.hpp"
#include "philab/orlicz.hpp"
#include "philab/phi_family.hpp"
#include "philab/variational.hpp"
#include "philab/viscosity.hpp"

using namespace philab;

namespace {

ScalarField affine_data(const GridDomain& d) {
  return ScalarField::sample(d, [](const Point& x) { return x[0] + 0.5 * std::sin(3.0 * x[1]); });
}

void BM_PhiEvaluation(benchmark::State& state) {
  const PhiFamily f = PhiFamily::constant_power(static_cast<double>(state.range(0)));
  double s = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.big_phi({0.3, 0.4}, s));
    s = s < 2.0 ? s * 1.0001 : 0.5;
  }
}
BENCHMARK(BM_PhiEvaluation)->Arg(4)->Arg(64);

void BM_Conjugate(benchmark::State& state) {
  const ConjugatePhi c(PhiFamily::constant_power(4.0));
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c.eval({0.0, 0.0}, t));
    t = t < 10.0 ? t * 1.01 : 0.1;
  }
}
BENCHMARK(BM_Conjugate);

void BM_Luxemburg(benchmark::State& state) {
  const GridDomain d(2, static_cast<int>(state.range(0)));
  const ScalarField u = affine_data(d);
  const PhiFamily f = PhiFamily::constant_power(8.0);
  for (auto _ : state) benchmark::DoNotOptimize(luxemburg_norm(f, d, u));
}
BENCHMARK(BM_Luxemburg)->Arg(17)->Arg(65);

void BM_EnergyAndResidual(benchmark::State& state) {
  const GridDomain d(2, static_cast<int>(state.range(0)));
  const ScalarField g = affine_data(d);
  const EnergyProblem pr{PhiFamily::constant_power(16.0), d, g, 0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy(pr, g));
    benchmark::DoNotOptimize(euler_residual(pr, g));
  }
}
BENCHMARK(BM_EnergyAndResidual)->Arg(33)->Arg(65);

void BM_Minimize(benchmark::State& state) {
  const GridDomain d(2, 17);
  const ScalarField g = affine_data(d);
  const EnergyProblem pr{PhiFamily::constant_power(static_cast<double>(state.range(0))), d, g, 0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(minimize(pr, std::nullopt).final_energy);
}
BENCHMARK(BM_Minimize)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_LimitSolve(benchmark::State& state) {
  const GridDomain d(2, static_cast<int>(state.range(0)));
  const ScalarField g = affine_data(d);
  for (auto _ : state) benchmark::DoNotOptimize(solve_limit(LimitOperator::zero(), d, g).iterations);
}
BENCHMARK(BM_LimitSolve)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_InequalityCheck(benchmark::State& state) {
  auto c = MonotoneTestCase::make(PhiFamily::constant_power(4.0), 3, {1.0, -2.0, 0.5}, {0.3, 0.1, -0.7});
  for (auto _ : state) benchmark::DoNotOptimize(check_inequality_main(c).size());
}
BENCHMARK(BM_InequalityCheck);

}  // namespace

BENCHMARK_MAIN();
