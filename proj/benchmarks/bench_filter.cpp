#include <benchmark/benchmark.h>

#include <memory>

#include "msukf/filter.hpp"
#include "msukf/harness.hpp"
#include "msukf/models.hpp"
#include "msukf/sigma.hpp"

using namespace msukf;

namespace {

ScalingSet multi_scaling(Eigen::Index n) {
  Vector alpha = Vector::LinSpaced(n, 0.01, 2.0);
  return make_scaling(alpha, Vector::Zero(n), 2.0);
}

void BM_GenerateSigmaPoints(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix a = Matrix::Random(n, n);
  const Matrix p = a * a.transpose() + Matrix::Identity(n, n);
  const Vector x = Vector::Random(n);
  const ScalingSet s = multi_scaling(n);
  for (auto _ : state) benchmark::DoNotOptimize(generate(x, p, s));
}
BENCHMARK(BM_GenerateSigmaPoints)->Arg(2)->Arg(6)->Arg(12);

void BM_FilterCycle(benchmark::State& state) {
  const auto model = std::make_shared<const ModelSpec>(sigmoid2d_model());
  const UnscentedFilter filter(FilterConfig{multi_scaling(2), 1e-9, model});
  const Trajectory traj = simulate(*model, 1);
  const StateEstimate est = filter.init();
  for (auto _ : state) {
    const Prediction pred = filter.time_update(est);
    benchmark::DoNotOptimize(
        filter.measurement_update(pred.predicted, pred.propagated, traj.measurements[0]));
  }
}
BENCHMARK(BM_FilterCycle);

void BM_MonteCarloRun(benchmark::State& state) {
  const auto model = std::make_shared<const ModelSpec>(sigmoid2d_model());
  MCConfig cfg;
  cfg.model = model;
  cfg.scaling = multi_scaling(2);
  cfg.runs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_mc(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloRun)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
