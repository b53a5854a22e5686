// Serial reference vs OpenMP sweep, and batched grid scoring vs the
// per-fence reference path.

#include <benchmark/benchmark.h>

#include "geofence/seed.hpp"
#include "geofence/sweep.hpp"
#include "geofence/synth.hpp"

using namespace geofence;

namespace {

const std::vector<SplitTrajectory>& corpus() {
  static const auto data = [] {
    SynthSpec spec;
    spec.kinds = {MotionKind::ConstantVelocity, MotionKind::Turning};
    spec.count = 8;
    spec.speed_min = 8.0;
    spec.speed_max = 25.0;
    spec.jitter = 3.0;
    spec.seed = 7;
    std::vector<SplitTrajectory> out;
    for (const auto& t : synthesize_tracks(spec)) out.push_back(train_test_split(t.observed));
    return out;
  }();
  return data;
}

SweepSettings settings() {
  SweepSettings s;
  s.eval.predictor.fit.max_evals = 60;
  return s;
}

const SweepSpec kSpec{SweepParam::Lambda, {0.5, 2.0}};

void BM_SweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(corpus(), kSpec, settings()));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SweepParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_parallel(corpus(), kSpec, settings(), workers));
}
BENCHMARK(BM_SweepParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

struct GridCase {
  SparseSplit sparse;
  FenceGrid grid;
  std::vector<MeasurementForecast> forecasts;
  EvalConfig eval;
};

const GridCase& grid_case() {
  static const GridCase c = [] {
    GridCase g;
    const auto& split = corpus().front();
    g.eval = settings().eval;
    g.sparse = subsample_split(split, g.eval.policy.rate, derive_seed(1, split.id));
    g.grid = build_grid(split, 1000.0, 3000.0);
    g.forecasts = forecast_measurements(g.sparse, PredictorKind::GpMeanFunc, g.eval);
    return g;
  }();
  return c;
}

void BM_GridBatched(benchmark::State& state) {
  const auto& c = grid_case();
  const auto& test = corpus().front().test;
  for (auto _ : state) benchmark::DoNotOptimize(score_grid(c.forecasts, test, c.grid, c.eval.payoff));
  state.counters["cells"] = static_cast<double>(c.grid.size());
}
BENCHMARK(BM_GridBatched)->Unit(benchmark::kMillisecond);

void BM_GridPerFence(benchmark::State& state) {
  const auto& c = grid_case();
  const auto& test = corpus().front().test;
  for (auto _ : state) {
    double v = 0.0;
    for (const auto& cell : c.grid.cells()) {
      v += score_fence_trajectory(c.sparse, test, cell, PredictorKind::GpMeanFunc, c.eval).v_fence_traj;
    }
    benchmark::DoNotOptimize(v);
  }
  state.counters["cells"] = static_cast<double>(c.grid.size());
}
BENCHMARK(BM_GridPerFence)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
