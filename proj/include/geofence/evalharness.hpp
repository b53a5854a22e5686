#pragma once

// Realized-value evaluation: ground-truth fence crossings from the dense
// trajectory, the per-measurement payoff rule with its act-once latch, and
// grid-wide scoring of one trajectory.

#include <cstdint>
#include <optional>
#include <vector>

#include "geofence/decide.hpp"
#include "geofence/predict.hpp"
#include "geofence/trajdata.hpp"

namespace geofence {

struct FenceCrossing {
  std::optional<double> t_in;
  std::optional<double> t_out;
};

// First entry into and first exit out of the fence, interpolating linearly
// between consecutive points. Containment is half-open per axis.
FenceCrossing fence_crossing(const Trajectory& dense, const Geofence& fence);

enum class StepOutcome { Zero, Alpha, Beta, Delta };

// Which payoff the decision taken at measurement t_i earns, given the
// absolute act time (+inf when waiting).
StepOutcome classify_step(double t_hat_abs, const FenceCrossing& crossing, double t_i, double t_next) noexcept;
double payoff_of(StepOutcome outcome, const PayoffMatrix& payoff) noexcept;

double realized_value_step(double t_hat_abs, const FenceCrossing& crossing, double t_i, double t_next,
                           const PayoffMatrix& payoff) noexcept;

struct FenceGrid {
  double cell_size = 1000.0;
  double margin = 18000.0;
  std::int64_t col_min = 0, col_max = -1;  // inclusive cell index ranges; cell (r, c) centered at (c L, r L)
  std::int64_t row_min = 0, row_max = -1;

  std::size_t cols() const noexcept { return static_cast<std::size_t>(col_max - col_min + 1); }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(row_max - row_min + 1); }
  std::size_t size() const noexcept { return rows() * cols(); }
  Geofence cell(std::size_t row, std::size_t col) const noexcept;
  std::vector<Geofence> cells() const;  // row-major
};

// Covers the test-data bounding box grown by margin on every side, with one
// cell centered on the origin.
FenceGrid build_grid(const SplitTrajectory& split, double cell_size, double margin = 18000.0);
FenceGrid build_grid(const Trajectory& test, double cell_size, double margin = 18000.0);

struct EvalConfig {
  PredictorConfig predictor;
  PayoffMatrix payoff;
  CutoffPolicy policy;  // policy.rate is the measurement rate assumed by t*
};

// Bernoulli-thinned train and test parts.
struct SparseSplit {
  Trajectory train;
  Trajectory test;
};

// Thins train and test separately; both keep their endpoints. When
// lambda*tau exceeds delta_t every point is kept.
SparseSplit subsample_split(const SplitTrajectory& split, const PoissonRate& rate, std::uint64_t seed);

// History visible at sparse test measurement i: thinned train part plus the
// thinned test prefix up to and including i.
Trajectory sparse_history(const SparseSplit& sparse, std::size_t i);

struct StepTrace {
  double t_i = 0.0;
  double t_next = 0.0;
  DecisionOutcome decision;
  double t_hat_abs = DecisionOutcome::kNever;
  StepOutcome outcome = StepOutcome::Zero;
  double value = 0.0;
};

struct RealizedScore {
  std::vector<double> per_measurement;
  double v_fence_traj = 0.0;
  std::optional<std::size_t> latched_at;
  std::size_t acts = 0;  // measurements whose act time fell before the next measurement
  std::vector<StepTrace> trace;
};

// Reference path: fits and scans for each measurement independently.
RealizedScore score_fence_trajectory(const SparseSplit& sparse, const Trajectory& dense_test, const Geofence& fence,
                                     PredictorKind kind, const EvalConfig& config);

// Predictive distributions over the scan grid for every evaluated
// measurement; independent of the fence.
struct MeasurementForecast {
  double t_i = 0.0;
  double t_next = 0.0;
  double step = 1.0;
  std::vector<GaussianLocation> track;  // at dt = k * scan_step, k < scan_count
};

std::vector<MeasurementForecast> forecast_measurements(const SparseSplit& sparse, PredictorKind kind,
                                                       const EvalConfig& config);

struct GridScore {
  double v_s = 0.0;  // sum over cells in row-major order
  std::size_t acts = 0;
  std::vector<double> per_cell;  // V_{R,S} per cell, row-major
};

// Batched path over a whole grid; identical decisions to the reference path.
GridScore score_grid(const std::vector<MeasurementForecast>& forecasts, const Trajectory& dense_test,
                     const FenceGrid& grid, const PayoffMatrix& payoff);

// Mean of (std_x + std_y) / 2 over every forecast point.
double mean_predictive_std(const std::vector<MeasurementForecast>& forecasts);

}  // namespace geofence
