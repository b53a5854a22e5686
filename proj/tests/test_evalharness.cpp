#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "geofence/evalharness.hpp"
#include "scenarios.hpp"

using namespace geofence;

namespace {

Trajectory path(std::initializer_list<TrackPoint> pts) {
  Trajectory t;
  t.points = pts;
  return t;
}

const PayoffMatrix kAd = PayoffMatrix::advertising();

EvalConfig default_eval() {
  EvalConfig c;
  c.payoff = kAd;
  c.policy = {0.2, PoissonRate{0.5, 60.0}, 1.0};
  return c;
}

}  // namespace

TEST_CASE("fence_crossing through the middle") {
  const auto c = fence_crossing(path({{0, -10, 0}, {20, 10, 0}}), {0, 0, 5});
  REQUIRE(c.t_in);
  REQUIRE(c.t_out);
  CHECK(*c.t_in == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(*c.t_out == doctest::Approx(15.0).epsilon(1e-14));
}

TEST_CASE("fence_crossing misses and starts") {
  const auto miss = fence_crossing(path({{0, -10, 20}, {20, 10, 20}}), {0, 0, 5});
  CHECK_FALSE(miss.t_in);
  CHECK_FALSE(miss.t_out);

  const auto start = fence_crossing(path({{7, 1, 1}, {17, 1, 30}}), {0, 0, 5});
  REQUIRE(start.t_in);
  CHECK(*start.t_in == 7.0);
  REQUIRE(start.t_out);
  CHECK(*start.t_out == doctest::Approx(7.0 + 10.0 * 4.0 / 29.0).epsilon(1e-14));

  const auto ends_inside = fence_crossing(path({{0, -20, 0}, {10, 0, 0}}), {0, 0, 5});
  REQUIRE(ends_inside.t_in);
  CHECK(*ends_inside.t_in == doctest::Approx(7.5));
  CHECK_FALSE(ends_inside.t_out);
}

TEST_CASE("fence_crossing uses only the first visit") {
  const auto c = fence_crossing(path({{0, -10, 0}, {10, 0, 0}, {20, 10, 0}, {30, 0, 0}, {40, -10, 0}}), {0, 0, 2});
  CHECK(*c.t_in == doctest::Approx(8.0));
  CHECK(*c.t_out == doctest::Approx(12.0));
}

TEST_CASE("fence_crossing corner graze obeys half-open edges") {
  // Touches only the closed top-right corner: never inside.
  const auto graze = fence_crossing(path({{0, 0, 10}, {10, 10, 0}}), {0, 0, 5});
  CHECK_FALSE(graze.t_in);
  // Touches the bottom-left corner, which is inside.
  const auto corner = fence_crossing(path({{0, -10, 0}, {10, 0, -10}}), {0, 0, 5});
  REQUIRE(corner.t_in);
  CHECK(*corner.t_in == doctest::Approx(5.0));
}

TEST_CASE("crossing points lie on the fence boundary") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int found = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Trajectory t;
    double x = 300 * u(rng), y = 300 * u(rng);
    for (int i = 0; i < 6; ++i) {
      t.points.push_back({10.0 * i, x, y});
      x += 120 * u(rng);
      y += 120 * u(rng);
    }
    const Geofence f{50 * u(rng), 50 * u(rng), 60 + 40 * u(rng)};
    const auto c = fence_crossing(t, f);
    const auto o = oracle::crossing(t, f);
    CHECK(c.t_in.has_value() == o.first.has_value());
    CHECK(c.t_out.has_value() == o.second.has_value());
    if (c.t_in && o.first) CHECK(std::abs(*c.t_in - *o.first) < 1e-9);
    if (c.t_out && o.second) CHECK(std::abs(*c.t_out - *o.second) < 1e-9);
    for (auto when : {c.t_in, c.t_out}) {
      if (!when || *when == t.front().t) continue;
      const auto seg = std::upper_bound(t.points.begin(), t.points.end(), *when,
                                        [](double v, const TrackPoint& p) { return v < p.t; });
      const auto& b = *seg;
      const auto& a = *(seg - 1);
      const double s = (*when - a.t) / (b.t - a.t);
      const double px = a.x + s * (b.x - a.x), py = a.y + s * (b.y - a.y);
      const double dx = std::min(std::abs(px - f.x_lo()), std::abs(px - f.x_hi()));
      const double dy = std::min(std::abs(py - f.y_lo()), std::abs(py - f.y_hi()));
      CHECK(std::min(dx, dy) < 1e-6);
      ++found;
    }
    if (c.t_in && c.t_out) CHECK(*c.t_in <= *c.t_out);
  }
  CHECK(found > 20);
}

TEST_CASE("realized value of one step") {
  const FenceCrossing visit{10.0, 30.0};
  CHECK(realized_value_step(20.0, visit, 0.0, 60.0, kAd) == kAd.beta);
  CHECK(realized_value_step(DecisionOutcome::kNever, visit, 0.0, 60.0, kAd) == kAd.alpha);
  CHECK(realized_value_step(5.0, visit, 0.0, 60.0, kAd) == kAd.delta);
  CHECK(realized_value_step(DecisionOutcome::kNever, {70.0, 90.0}, 0.0, 60.0, kAd) == 0.0);
}

TEST_CASE("step classification covers every case") {
  const FenceCrossing visit{10.0, 30.0};
  // acting
  CHECK(classify_step(10.0, visit, 0.0, 60.0) == StepOutcome::Beta);  // closed at t_in
  CHECK(classify_step(30.0, visit, 0.0, 60.0) == StepOutcome::Beta);  // closed at t_out
  CHECK(classify_step(31.0, visit, 0.0, 60.0) == StepOutcome::Delta);
  CHECK(classify_step(60.0, visit, 0.0, 60.0) == StepOutcome::Delta);  // act exactly at t_next counts
  CHECK(classify_step(5.0, {}, 0.0, 60.0) == StepOutcome::Delta);
  CHECK(classify_step(5.0, {2.0, std::nullopt}, 0.0, 60.0) == StepOutcome::Beta);
  // waiting: the six positions of a visit relative to [t_i, t_next]
  CHECK(classify_step(DecisionOutcome::kNever, {1.0, 5.0}, 10.0, 20.0) == StepOutcome::Zero);     // already over
  CHECK(classify_step(DecisionOutcome::kNever, {5.0, 15.0}, 10.0, 20.0) == StepOutcome::Alpha);   // exits inside
  CHECK(classify_step(DecisionOutcome::kNever, {12.0, 15.0}, 10.0, 20.0) == StepOutcome::Alpha);  // whole visit
  CHECK(classify_step(DecisionOutcome::kNever, {12.0, 25.0}, 10.0, 20.0) == StepOutcome::Zero);   // deferred
  CHECK(classify_step(DecisionOutcome::kNever, {5.0, 25.0}, 10.0, 20.0) == StepOutcome::Zero);    // spans
  CHECK(classify_step(DecisionOutcome::kNever, {25.0, 35.0}, 10.0, 20.0) == StepOutcome::Zero);   // later
  CHECK(classify_step(DecisionOutcome::kNever, {5.0, 20.0}, 10.0, 20.0) == StepOutcome::Alpha);   // t_out on edge
  CHECK(classify_step(DecisionOutcome::kNever, {5.0, std::nullopt}, 10.0, 20.0) == StepOutcome::Zero);
  CHECK(classify_step(DecisionOutcome::kNever, {}, 10.0, 20.0) == StepOutcome::Zero);
  // a finite act time after the next measurement is a wait
  CHECK(classify_step(21.0, {12.0, 15.0}, 10.0, 20.0) == StepOutcome::Alpha);
}

TEST_CASE("passive wait straddling a small fence earns alpha once") {
  SparseSplit s;
  s.train = path({{-10, -200, 0}});
  s.test = path({{0, -100, 0}, {10, 0, 0}, {20, 100, 0}});
  const Geofence f{50, 0, 10};
  const auto score = score_fence_trajectory(s, s.test, f, PredictorKind::PassiveWait, default_eval());
  REQUIRE(score.per_measurement.size() == 2);
  CHECK(score.per_measurement[0] == 0.0);
  CHECK(score.per_measurement[1] == kAd.alpha);
  CHECK(score.v_fence_traj == kAd.alpha);
  CHECK_FALSE(score.latched_at);
  CHECK(score.acts == 0);
}

TEST_CASE("passive wait with a sample inside latches beta") {
  SparseSplit s;
  s.train = path({{-10, -200, 0}});
  s.test = path({{0, -100, 0}, {10, 0, 0}, {20, 100, 0}, {30, 0, 0}, {40, -100, 0}});
  const Geofence f{0, 0, 30};
  const auto score = score_fence_trajectory(s, s.test, f, PredictorKind::PassiveWait, default_eval());
  REQUIRE(score.per_measurement.size() == 4);
  CHECK(score.per_measurement == std::vector<double>{0.0, kAd.beta, 0.0, 0.0});
  REQUIRE(score.latched_at);
  CHECK(*score.latched_at == 1);
  CHECK(score.v_fence_traj == kAd.beta);
  CHECK(score.trace[1].t_hat_abs == 10.0);
}

TEST_CASE("a fence never approached scores zero") {
  SparseSplit s;
  s.train = path({{-10, -200, 0}});
  s.test = path({{0, -100, 0}, {10, 0, 0}, {20, 100, 0}});
  for (auto kind : kAllPredictors) {
    const auto score = score_fence_trajectory(s, s.test, {0, 5000, 100}, kind, default_eval());
    CHECK(score.v_fence_traj == 0.0);
    CHECK(score.acts == 0);
  }
}

TEST_CASE("grid counts") {
  Trajectory test = path({{0, -1000, -1000}, {10, 1000, 1000}});
  const auto small = build_grid(test, 1000.0, 0.0);
  CHECK(small.cols() == 3);
  CHECK(small.rows() == 3);
  CHECK(small.size() == 9);
  const auto center = small.cell(1, 1);
  CHECK(center.center_x == 0.0);
  CHECK(center.center_y == 0.0);
  CHECK(center.x_lo() == -500.0);
  const auto big = build_grid(test, 1000.0, 18000.0);
  CHECK(big.cols() == 39);
  CHECK(big.rows() == 39);
}

TEST_CASE("grid cells tile the expanded box") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Trajectory test;
    for (int i = 0; i < 5; ++i) test.points.push_back({5.0 * i, 3000 * u(rng), 3000 * u(rng)});
    const double L = 300 + 700 * (u(rng) + 1);
    const double margin = 2000 * (u(rng) + 1);
    const auto g = build_grid(test, L, margin);
    double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
    for (const auto& p : test.points) {
      bx0 = std::min(bx0, p.x), bx1 = std::max(bx1, p.x);
      by0 = std::min(by0, p.y), by1 = std::max(by1, p.y);
    }
    const auto cells = g.cells();
    CHECK(cells.size() == g.size());
    CHECK(cells.front().x_lo() <= bx0 - margin);
    CHECK(cells.front().y_lo() <= by0 - margin);
    CHECK(cells.back().x_hi() > bx1 + margin);
    CHECK(cells.back().y_hi() > by1 + margin);
    // Minimal: dropping an outer ring would uncover part of the box.
    CHECK(cells.front().x_hi() > bx0 - margin);
    CHECK(cells.back().x_lo() <= bx1 + margin);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto& a = cells[i - 1];
      const auto& b = cells[i];
      if (a.center_y == b.center_y) CHECK(a.x_hi() == doctest::Approx(b.x_lo()));
    }
    bool origin_cell = false;
    for (const auto& c : cells) origin_cell |= (c.center_x == 0.0 && c.center_y == 0.0);
    CHECK(origin_cell);
  }
}

TEST_CASE("split subsampling keeps endpoints and clamps high rates") {
  SplitTrajectory split;
  for (int i = 0; i <= 60; ++i) split.train.points.push_back({5.0 * i, 10.0 * i - 3000, 0});
  for (int i = 61; i <= 240; ++i) split.test.points.push_back({5.0 * i, 10.0 * i - 3000, 0});
  const auto sparse = subsample_split(split, {0.5, 60.0}, 99);
  CHECK(sparse.train.front().t == 0.0);
  CHECK(sparse.train.back().t == 300.0);
  CHECK(sparse.test.front().t == 305.0);
  CHECK(sparse.test.back().t == 1200.0);
  CHECK(sparse.test.size() < split.test.size());
  const auto again = subsample_split(split, {0.5, 60.0}, 99);
  CHECK(again.test.size() == sparse.test.size());
  const auto all = subsample_split(split, {20.0, 60.0}, 99);
  CHECK(all.test.size() == split.test.size());
  CHECK(all.train.size() == split.train.size());

  const auto h = sparse_history(sparse, 1);
  CHECK(h.size() == sparse.train.size() + 2);
  CHECK(h.back().t == sparse.test.points[1].t);
}

TEST_CASE("batched grid scoring reproduces the per-fence path exactly") {
  SplitTrajectory split;
  for (int i = 0; i <= 60; ++i) split.train.points.push_back({5.0 * i, 12.0 * (i - 60), 3.0 * (i - 60)});
  for (int i = 61; i <= 240; ++i) {
    const double s = 5.0 * (i - 60);
    split.test.points.push_back({5.0 * i, 12.0 * s * std::cos(s / 400.0), 300.0 * std::sin(s / 300.0)});
  }
  for (auto kind : kAllPredictors) {
    for (const auto& payoff : {PayoffMatrix::advertising(), PayoffMatrix::alert_zone()}) {
      EvalConfig cfg = default_eval();
      cfg.payoff = payoff;
      cfg.policy.rate.lambda = 2.0;
      const auto sparse = subsample_split(split, cfg.policy.rate, 5);
      const auto grid = build_grid(split, 1000.0, 2000.0);
      const auto forecasts = forecast_measurements(sparse, kind, cfg);
      const auto batched = score_grid(forecasts, split.test, grid, payoff);
      const auto cells = grid.cells();
      double total = 0.0;
      std::size_t acts = 0;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto ref = score_fence_trajectory(sparse, split.test, cells[c], kind, cfg);
        CHECK(batched.per_cell[c] == ref.v_fence_traj);
        total += ref.v_fence_traj;
        acts += ref.acts;
      }
      CHECK(batched.v_s == total);
      CHECK(batched.acts == acts);
    }
  }
}

TEST_CASE("realized value matches the brute-force oracle on tiny scenarios") {
  scenario::Check check;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) scenario::evaluate(scenario::make(seed), check);
  CHECK(check.fences == 360);
  CHECK(check.max_err_reference <= 1e-12);
  CHECK(check.max_err_grid <= 1e-12);
  CHECK(check.betas_over_one == 0);
  CHECK(check.values_in_set);
}

TEST_CASE("mean predictive std") {
  std::vector<MeasurementForecast> f(2);
  f[0].track = {{0, 0, 2.0, 4.0}, {0, 0, 4.0, 4.0}};
  f[1].track = {{0, 0, 1.0, 1.0}};
  CHECK(mean_predictive_std(f) == doctest::Approx((3.0 + 4.0 + 1.0) / 3.0));
  CHECK(mean_predictive_std({}) == 0.0);
}
