#include "geofence/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geofence/error.hpp"
#include "geofence/seed.hpp"

namespace geofence {

namespace {

// Parameter interval on a segment, with independent end closedness.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool empty() const noexcept { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }

  Interval intersect(const Interval& o) const noexcept {
    Interval r;
    if (lo > o.lo) {
      r.lo = lo, r.lo_closed = lo_closed;
    } else if (o.lo > lo) {
      r.lo = o.lo, r.lo_closed = o.lo_closed;
    } else {
      r.lo = lo, r.lo_closed = lo_closed && o.lo_closed;
    }
    if (hi < o.hi) {
      r.hi = hi, r.hi_closed = hi_closed;
    } else if (o.hi < hi) {
      r.hi = o.hi, r.hi_closed = o.hi_closed;
    } else {
      r.hi = hi, r.hi_closed = hi_closed && o.hi_closed;
    }
    return r;
  }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// {s : lo <= x0 + s dx < hi}
Interval slab(double x0, double dx, double lo, double hi) noexcept {
  if (dx == 0.0) {
    if (x0 >= lo && x0 < hi) return {-kInf, kInf, true, true};
    return {1.0, 0.0, true, true};
  }
  if (dx > 0.0) return {(lo - x0) / dx, (hi - x0) / dx, true, false};
  return {(hi - x0) / dx, (lo - x0) / dx, false, true};
}

Interval inside_on_segment(const TrackPoint& a, const TrackPoint& b, const Geofence& fence) noexcept {
  const Interval unit{0.0, 1.0, true, true};
  return unit.intersect(slab(a.x, b.x - a.x, fence.x_lo(), fence.x_hi()))
      .intersect(slab(a.y, b.y - a.y, fence.y_lo(), fence.y_hi()));
}

}  // namespace

FenceCrossing fence_crossing(const Trajectory& dense, const Geofence& fence) {
  FenceCrossing out;
  if (dense.empty()) return out;
  if (fence.contains(dense.front().x, dense.front().y)) out.t_in = dense.front().t;

  for (std::size_t i = 1; i < dense.size(); ++i) {
    const TrackPoint& a = dense.points[i - 1];
    const TrackPoint& b = dense.points[i];
    const Interval in = inside_on_segment(a, b, fence);
    const double span = b.t - a.t;
    if (!out.t_in) {
      if (in.empty()) continue;
      out.t_in = a.t + in.lo * span;
    } else if (in.empty() || in.lo > 0.0) {
      out.t_out = a.t;
      return out;
    }
    if (!(in.hi == 1.0 && in.hi_closed)) {
      out.t_out = a.t + in.hi * span;
      return out;
    }
  }
  return out;
}

StepOutcome classify_step(double t_hat_abs, const FenceCrossing& crossing, double t_i, double t_next) noexcept {
  const bool act = t_hat_abs <= t_next;
  if (!crossing.t_in) return act ? StepOutcome::Delta : StepOutcome::Zero;
  const double t_in = *crossing.t_in;
  const double t_out = crossing.t_out.value_or(kInf);
  if (act) return (t_hat_abs >= t_in && t_hat_abs <= t_out) ? StepOutcome::Beta : StepOutcome::Delta;
  if (crossing.t_out && t_i <= t_out && t_out <= t_next) return StepOutcome::Alpha;
  return StepOutcome::Zero;
}

double payoff_of(StepOutcome outcome, const PayoffMatrix& payoff) noexcept {
  switch (outcome) {
    case StepOutcome::Alpha: return payoff.alpha;
    case StepOutcome::Beta: return payoff.beta;
    case StepOutcome::Delta: return payoff.delta;
    case StepOutcome::Zero: break;
  }
  return 0.0;
}

double realized_value_step(double t_hat_abs, const FenceCrossing& crossing, double t_i, double t_next,
                           const PayoffMatrix& payoff) noexcept {
  return payoff_of(classify_step(t_hat_abs, crossing, t_i, t_next), payoff);
}

Geofence FenceGrid::cell(std::size_t row, std::size_t col) const noexcept {
  const auto c = col_min + static_cast<std::int64_t>(col);
  const auto r = row_min + static_cast<std::int64_t>(row);
  return {static_cast<double>(c) * cell_size, static_cast<double>(r) * cell_size, 0.5 * cell_size};
}

std::vector<Geofence> FenceGrid::cells() const {
  std::vector<Geofence> out;
  out.reserve(size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) out.push_back(cell(r, c));
  }
  return out;
}

FenceGrid build_grid(const Trajectory& test, double cell_size, double margin) {
  if (!(cell_size > 0.0)) throw Error(Errc::ConfigError, "cell size must be positive");
  FenceGrid grid;
  grid.cell_size = cell_size;
  grid.margin = margin;
  if (test.empty()) return grid;
  double x_lo = test.front().x, x_hi = x_lo, y_lo = test.front().y, y_hi = y_lo;
  for (const auto& p : test.points) {
    x_lo = std::min(x_lo, p.x), x_hi = std::max(x_hi, p.x);
    y_lo = std::min(y_lo, p.y), y_hi = std::max(y_hi, p.y);
  }
  // Cell k covers [k L - L/2, k L + L/2).
  auto index = [&](double v) { return static_cast<std::int64_t>(std::floor((v + 0.5 * cell_size) / cell_size)); };
  grid.col_min = index(x_lo - margin);
  grid.col_max = index(x_hi + margin);
  grid.row_min = index(y_lo - margin);
  grid.row_max = index(y_hi + margin);
  return grid;
}

FenceGrid build_grid(const SplitTrajectory& split, double cell_size, double margin) {
  return build_grid(split.test, cell_size, margin);
}

SparseSplit subsample_split(const SplitTrajectory& split, const PoissonRate& rate, std::uint64_t seed) {
  auto thin = [&](const Trajectory& part, std::uint64_t part_seed) {
    const double tau = part.gap.value_or(part.size() >= 2 ? dominant_gap(part) : 1.0);
    PoissonRate effective = rate;
    if (rate.lambda * tau > rate.delta_t) effective.lambda = rate.delta_t / tau;
    return bernoulli_subsample(part, effective, tau, part_seed);
  };
  return {thin(split.train, mix_seed(seed, 1)), thin(split.test, mix_seed(seed, 2))};
}

Trajectory sparse_history(const SparseSplit& sparse, std::size_t i) {
  Trajectory history;
  history.points.reserve(sparse.train.size() + i + 1);
  history.points = sparse.train.points;
  const auto end = sparse.test.points.begin() + static_cast<std::ptrdiff_t>(std::min(i + 1, sparse.test.size()));
  history.points.insert(history.points.end(), sparse.test.points.begin(), end);
  return history;
}

RealizedScore score_fence_trajectory(const SparseSplit& sparse, const Trajectory& dense_test, const Geofence& fence,
                                     PredictorKind kind, const EvalConfig& config) {
  RealizedScore score;
  const FenceCrossing crossing = fence_crossing(dense_test, fence);
  const auto& pts = sparse.test.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    StepTrace step{pts[i].t, pts[i + 1].t};
    if (!score.latched_at) {
      const FittedPredictor pred = fit(sparse_history(sparse, i), step.t_i, config.predictor, kind);
      step.decision = find_act_time(pred, fence, config.payoff, config.policy);
      step.t_hat_abs = step.t_i + step.decision.t_hat;
      step.outcome = classify_step(step.t_hat_abs, crossing, step.t_i, step.t_next);
      step.value = payoff_of(step.outcome, config.payoff);
      if (step.t_hat_abs <= step.t_next) ++score.acts;
      if (step.outcome == StepOutcome::Beta) score.latched_at = i;
    }
    score.per_measurement.push_back(step.value);
    score.v_fence_traj += step.value;
    score.trace.push_back(step);
  }
  return score;
}

std::vector<MeasurementForecast> forecast_measurements(const SparseSplit& sparse, PredictorKind kind,
                                                       const EvalConfig& config) {
  const std::size_t steps = scan_count(config.policy);
  std::vector<MeasurementForecast> out;
  const auto& pts = sparse.test.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    MeasurementForecast f{pts[i].t, pts[i + 1].t, config.policy.scan_step, {}};
    const FittedPredictor pred = fit(sparse_history(sparse, i), f.t_i, config.predictor, kind);
    f.track.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) f.track.push_back(pred.predict(static_cast<double>(k) * config.policy.scan_step));
    out.push_back(std::move(f));
  }
  return out;
}

GridScore score_grid(const std::vector<MeasurementForecast>& forecasts, const Trajectory& dense_test,
                     const FenceGrid& grid, const PayoffMatrix& payoff) {
  const double threshold = act_threshold(payoff);
  const std::size_t rows = grid.rows(), cols = grid.cols();
  GridScore out;
  out.per_cell.assign(grid.size(), 0.0);
  if (grid.size() == 0) return out;

  // Crossings only exist for cells touching the dense bounding box.
  std::vector<FenceCrossing> crossings(grid.size());
  if (!dense_test.empty()) {
    double x_lo = dense_test.front().x, x_hi = x_lo, y_lo = dense_test.front().y, y_hi = y_lo;
    for (const auto& p : dense_test.points) {
      x_lo = std::min(x_lo, p.x), x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y), y_hi = std::max(y_hi, p.y);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const Geofence f = grid.cell(r, c);
        if (f.x_hi() < x_lo || f.x_lo() > x_hi || f.y_hi() < y_lo || f.y_lo() > y_hi) continue;
        crossings[r * cols + c] = fence_crossing(dense_test, f);
      }
    }
  }

  std::vector<char> latched(grid.size(), 0);
  std::vector<double> px, py, col_max(cols), row_max(rows);
  for (const auto& f : forecasts) {
    const std::size_t steps = f.track.size();
    px.assign(cols * steps, 0.0);
    py.assign(rows * steps, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
      const Geofence fence = grid.cell(0, c);
      double m = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        const auto& g = f.track[k];
        m = std::max(m, px[c * steps + k] = axis_mass(fence.x_lo(), fence.x_hi(), g.mean_x, g.std_x));
      }
      col_max[c] = m;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const Geofence fence = grid.cell(r, 0);
      double m = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        const auto& g = f.track[k];
        m = std::max(m, py[r * steps + k] = axis_mass(fence.y_lo(), fence.y_hi(), g.mean_y, g.std_y));
      }
      row_max[r] = m;
    }

    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t cell = r * cols + c;
        if (latched[cell]) continue;
        double t_hat_abs = DecisionOutcome::kNever;
        // px * py <= col_max * row_max, and rounding preserves the order.
        if (col_max[c] * row_max[r] > threshold) {
          const double* xs = &px[c * steps];
          const double* ys = &py[r * steps];
          for (std::size_t k = 0; k < steps; ++k) {
            if (xs[k] * ys[k] > threshold) {
              t_hat_abs = f.t_i + static_cast<double>(k) * f.step;
              break;
            }
          }
        }
        const FenceCrossing& crossing = crossings[cell];
        if (t_hat_abs == DecisionOutcome::kNever && !crossing.t_out) continue;  // contributes exactly 0
        const StepOutcome outcome = classify_step(t_hat_abs, crossing, f.t_i, f.t_next);
        if (t_hat_abs <= f.t_next) ++out.acts;
        if (outcome == StepOutcome::Beta) latched[cell] = 1;
        out.per_cell[cell] += payoff_of(outcome, payoff);
      }
    }
  }
  for (double v : out.per_cell) out.v_s += v;
  return out;
}

double mean_predictive_std(const std::vector<MeasurementForecast>& forecasts) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& f : forecasts) {
    for (const auto& g : f.track) {
      sum += 0.5 * (g.std_x + g.std_y);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace geofence
