#include <sstream>

#include "doctest.h"
#include "geofence/error.hpp"
#include "geofence/seed.hpp"
#include "geofence/sweep.hpp"
#include "geofence/synth.hpp"

using namespace geofence;

namespace {

std::vector<SplitTrajectory> corpus(int count, std::uint64_t seed = 3) {
  SynthSpec spec;
  spec.kinds = {MotionKind::ConstantVelocity, MotionKind::Turning};
  spec.count = count;
  spec.speed_min = 8.0;
  spec.speed_max = 20.0;
  spec.jitter = 3.0;
  spec.seed = seed;
  std::vector<SplitTrajectory> out;
  for (const auto& track : synthesize_tracks(spec)) out.push_back(train_test_split(track.observed));
  return out;
}

SweepSettings quick() {
  SweepSettings s;
  s.eval.predictor.fit.max_evals = 40;
  s.cell_size = 1000.0;
  s.margin = 3000.0;
  s.master_seed = 11;
  return s;
}

std::string csv(const std::vector<SweepResult>& rows) {
  std::ostringstream out;
  write_sweep_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_CASE("sweep parameter names") {
  for (auto p : {SweepParam::Lambda, SweepParam::Epsilon, SweepParam::CellSize, SweepParam::Lookback,
                 SweepParam::SigmaM}) {
    CHECK(parse_sweep_param(to_string(p)) == p);
  }
  CHECK_FALSE(parse_sweep_param("tau"));
  const auto s = with_param(quick(), SweepParam::SigmaM, 42.0);
  CHECK(s.eval.predictor.sigma_m == 42.0);
  CHECK(with_param(quick(), SweepParam::Lambda, 4.0).eval.policy.rate.lambda == 4.0);
  CHECK(with_param(quick(), SweepParam::CellSize, 700.0).cell_size == 700.0);
}

TEST_CASE("serial and parallel sweeps agree to the byte") {
  const auto data = corpus(4);
  const SweepSpec spec{SweepParam::Lambda, {0.5, 4.0}};
  const auto serial = run_sweep_serial(data, spec, quick());
  for (int workers : {2, 8}) {
    const auto parallel = run_sweep_parallel(data, spec, quick(), workers);
    CHECK(csv(serial) == csv(parallel));
  }
  CHECK(csv(run_sweep(data, spec, quick(), 1)) == csv(serial));
}

TEST_CASE("sweep table shape and header") {
  const auto data = corpus(2);
  const SweepSpec spec{SweepParam::CellSize, {500, 1000, 1500, 2000, 2500, 3000}};
  const auto rows = run_sweep(data, spec, quick());
  REQUIRE(rows.size() == 18);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].value == spec.values[i / 3]);
    CHECK(rows[i].method == kAllPredictors[i % 3]);
    CHECK(rows[i].n_traj == 2);
  }
  const auto text = csv(rows);
  CHECK(text.rfind("param,value,method,V,n_traj,mean_acts,mean_pred_std\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 19);
}

TEST_CASE("single trajectory sweep equals the per-fence score") {
  const auto data = corpus(1);
  SweepSettings s = quick();
  s.methods = {PredictorKind::PassiveWait};
  const auto& split = data.front();
  const auto rows = run_sweep(data, {SweepParam::Lambda, {2.0}}, s);
  REQUIRE(rows.size() == 1);

  const auto sparse = subsample_split(split, {2.0, 60.0}, derive_seed(s.master_seed, split.id));
  const auto grid = build_grid(split, s.cell_size, s.margin);
  EvalConfig eval = s.eval;
  eval.policy.rate.lambda = 2.0;
  double total = 0.0;
  for (const auto& cell : grid.cells()) {
    total += score_fence_trajectory(sparse, split.test, cell, PredictorKind::PassiveWait, eval).v_fence_traj;
  }
  CHECK(rows.front().v == total);
  CHECK(evaluate_trajectory(split, PredictorKind::PassiveWait, with_param(s, SweepParam::Lambda, 2.0)).v_s == total);
}

TEST_CASE("duplicating the corpus leaves the mean unchanged") {
  auto data = corpus(2);
  const SweepSpec spec{SweepParam::Epsilon, {0.2}};
  const auto once = run_sweep(data, spec, quick());
  const auto copy = data;
  data.insert(data.end(), copy.begin(), copy.end());
  const auto twice = run_sweep(data, spec, quick());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice[i].v == doctest::Approx(once[i].v).epsilon(1e-12));
    CHECK(twice[i].n_traj == 4);
  }
}

TEST_CASE("saturated sampling inside one huge fence makes every method equal") {
  const auto data = corpus(2);
  SweepSettings s = quick();
  s.margin = 0.0;
  const auto rows = run_sweep(data, {SweepParam::CellSize, {1e6}}, with_param(s, SweepParam::Lambda, 1000.0));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].v == PayoffMatrix::advertising().beta);
  CHECK(rows[1].v == rows[0].v);
  CHECK(rows[2].v == rows[0].v);
}

TEST_CASE("sweep input errors") {
  const auto data = corpus(1);
  CHECK_THROWS_AS(run_sweep({}, {SweepParam::Lambda, {1.0}}, quick()), Error);
  CHECK_THROWS_AS(run_sweep(data, {SweepParam::Lambda, {}}, quick()), Error);
  SweepSettings none = quick();
  none.methods.clear();
  CHECK_THROWS_AS(run_sweep(data, {SweepParam::Lambda, {1.0}}, none), Error);
}
