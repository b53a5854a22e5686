#pragma once

// Tiny randomized evaluation scenarios: a dense test path, noisy sparse
// measurements of it, a 3x3 block of fences around the path, and a random method/payoff.

#include <algorithm>
#include <random>

#include "geofence/evalharness.hpp"
#include "oracles.hpp"

namespace scenario {

struct Scenario {
  geofence::SparseSplit sparse;
  geofence::Trajectory dense;
  geofence::FenceGrid grid;
  geofence::PredictorKind kind = geofence::PredictorKind::PassiveWait;
  geofence::EvalConfig config;
};

inline Scenario make(std::uint64_t seed) {
  using namespace geofence;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](int n) { return static_cast<int>(u(rng) * n) % n; };

  Scenario s;
  const int n_dense = 3 + pick(6);
  double t = 0.0, x = 0.0, y = 0.0;
  const double heading = 2.0 * std::numbers::pi * u(rng);
  for (int i = 0; i < n_dense; ++i) {
    s.dense.points.push_back({t, x, y});
    const double dt = 5.0 + 35.0 * u(rng);
    const double speed = 2.0 + 18.0 * u(rng);
    const double turn = heading + 1.5 * (u(rng) - 0.5);
    t += dt;
    x += speed * dt * std::cos(turn);
    y += speed * dt * std::sin(turn);
  }

  // Sparse measurements: both endpoints plus a random interior subset, at most 6.
  std::vector<std::size_t> idx{0};
  for (int i = 1; i + 1 < n_dense; ++i) {
    if (u(rng) < 0.6) idx.push_back(static_cast<std::size_t>(i));
  }
  while (idx.size() > 5) idx.erase(idx.begin() + 1 + pick(static_cast<int>(idx.size()) - 1));
  idx.push_back(static_cast<std::size_t>(n_dense - 1));
  // Measurements carry sigma_m noise; the dense path is the truth.
  const double noise_levels[] = {3.0, 25.0, 100.0};
  s.config.predictor.sigma_m = noise_levels[pick(3)];
  std::normal_distribution<double> noise(0.0, s.config.predictor.sigma_m);
  for (auto i : idx) {
    const auto& p = s.dense.points[i];
    s.sparse.test.points.push_back({p.t, p.x + noise(rng), p.y + noise(rng)});
  }

  // Short history before the test part.
  const int n_train = 1 + pick(3);
  for (int i = n_train; i >= 1; --i) {
    s.sparse.train.points.push_back({-15.0 * i, -100.0 * i * std::cos(heading) + 20.0 * (u(rng) - 0.5),
                                     -100.0 * i * std::sin(heading) + 20.0 * (u(rng) - 0.5)});
  }

  // 3x3 fences around a random dense point.
  const double cell = 60.0 + 240.0 * u(rng);
  const auto& anchor = s.dense.points[static_cast<std::size_t>(pick(n_dense))];
  const auto c0 = static_cast<std::int64_t>(std::floor(anchor.x / cell + 0.5)) - 1;
  const auto r0 = static_cast<std::int64_t>(std::floor(anchor.y / cell + 0.5)) - 1;
  s.grid = FenceGrid{cell, 0.0, c0, c0 + 2, r0, r0 + 2};

  s.kind = kAllPredictors[static_cast<std::size_t>(pick(3))];
  s.config.payoff = u(rng) < 0.5 ? PayoffMatrix::advertising() : PayoffMatrix::alert_zone();
  const double lambdas[] = {0.5, 2.0, 8.0};
  s.config.policy = CutoffPolicy{0.2, PoissonRate{lambdas[pick(3)], 60.0}, 1.0};
  s.config.predictor.fit.max_evals = 60;
  return s;
}

struct Check {
  double max_err_reference = 0.0;  // score_fence_trajectory vs oracle
  double max_err_grid = 0.0;       // score_grid vs oracle
  int fences = 0;
  int betas_over_one = 0;
  bool values_in_set = true;
  std::array<int, 7> wait_cases{};
  std::array<int, 4> outcomes{};  // zero, alpha, beta, delta
};

// Scores every fence three ways: the per-fence reference path, the batched
// grid path, and the brute-force oracle fed by an independent scan of the
// same forecasts.
inline void evaluate(const Scenario& s, Check& check) {
  using namespace geofence;
  const auto forecasts = forecast_measurements(s.sparse, s.kind, s.config);
  const auto grid_score = score_grid(forecasts, s.dense, s.grid, s.config.payoff);
  const double threshold = act_threshold(s.config.payoff);
  std::vector<double> times;
  for (const auto& p : s.sparse.test.points) times.push_back(p.t);

  const auto cells = s.grid.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& f = cells[c];
    std::vector<double> t_hat;
    for (const auto& fc : forecasts) {
      double act = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < fc.track.size(); ++k) {
        if (prob_inside(fc.track[k], f) > threshold) {
          act = fc.t_i + static_cast<double>(k) * fc.step;
          break;
        }
      }
      t_hat.push_back(act);
    }
    const auto [t_in, t_out] = oracle::crossing(s.dense, f);
    const auto o = oracle::realized_value(times, t_hat, t_in, t_out, s.config.payoff);
    const auto ref = score_fence_trajectory(s.sparse, s.dense, f, s.kind, s.config);

    check.max_err_reference = std::max(check.max_err_reference, std::abs(ref.v_fence_traj - o.v));
    check.max_err_grid = std::max(check.max_err_grid, std::abs(grid_score.per_cell[c] - o.v));
    ++check.fences;
    int betas = 0;
    for (std::size_t i = 0; i < ref.per_measurement.size(); ++i) {
      const double v = ref.per_measurement[i];
      const auto& m = s.config.payoff;
      if (v != 0.0 && v != m.alpha && v != m.beta && v != m.delta) check.values_in_set = false;
      if (ref.per_measurement[i] != o.values[i]) check.max_err_reference = std::max(check.max_err_reference, 1.0);
      ++check.outcomes[static_cast<std::size_t>(ref.trace[i].outcome)];
      if (ref.trace[i].outcome == StepOutcome::Beta) ++betas;
    }
    if (betas > 1) ++check.betas_over_one;
    for (std::size_t k = 0; k < 7; ++k) check.wait_cases[k] += o.wait_cases[k];
  }
}

}  // namespace scenario
