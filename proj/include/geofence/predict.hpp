#pragma once

// Probabilistic short-term location predictors. Every predictor answers the
// same question: where will the user be dt seconds after the anchor
// measurement, as an axis-independent bivariate Gaussian.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geofence/gp.hpp"
#include "geofence/trajdata.hpp"

#include "json.hpp"

namespace geofence {

struct GaussianLocation {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double std_x = 1.0;
  double std_y = 1.0;
};

enum class PredictorKind {
  PassiveWait,  // stationary at the latest measurement
  Gp,           // zero-mean GP per axis
  GpMeanFunc,   // GP per axis around the line through the two latest points
};

std::string_view to_string(PredictorKind kind) noexcept;
std::optional<PredictorKind> parse_predictor_kind(std::string_view name) noexcept;
inline constexpr std::array<PredictorKind, 3> kAllPredictors = {PredictorKind::PassiveWait, PredictorKind::Gp,
                                                                PredictorKind::GpMeanFunc};

// Hyperparameter search: log-spaced grid, then Nelder-Mead from the best
// grid points, all inside the same bounds.
struct FitSettings {
  double sigma_f_min = 1.0;
  double sigma_f_max = 1e4;
  double length_min = 1.0;
  double length_max = 600.0;
  int grid_points = 5;  // per dimension
  int starts = 2;
  int max_evals = 200;  // grid included
};

struct PredictorConfig {
  double sigma_m = 3.0;     // measurement noise std, meters
  double lookback = 300.0;  // training window, seconds
  FitSettings fit;
};

// Line through two points, stored relative to the anchor time.
struct LinearMean {
  double slope = 0.0;     // per second
  double at_anchor = 0.0;  // value at anchor_time
  double anchor_time = 0.0;

  double operator()(double t) const noexcept { return at_anchor + slope * (t - anchor_time); }
  double intercept() const noexcept { return (*this)(0.0); }
};

struct AxisLinearMeans {
  LinearMean x;
  LinearMean y;
};

// Exact interpolating line through the last two points with t <= t0.
AxisLinearMeans linear_mean(const Trajectory& history, double t0);

struct AxisModel {
  LinearMean mean;  // zero slope and value for the zero-mean GP
  std::optional<GpSolver> gp;
};

class FittedPredictor {
 public:
  PredictorKind kind() const noexcept { return kind_; }
  double anchor_time() const noexcept { return anchor_time_; }
  double sigma_m() const noexcept { return sigma_m_; }
  std::size_t window_size() const noexcept { return window_size_; }
  const AxisModel& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }

  // Predictive distribution at anchor_time + dt; GP variances include sigma_m^2.
  GaussianLocation predict(double dt) const;

  nlohmann::json to_json() const;

 private:
  friend FittedPredictor fit(const Trajectory&, double, const PredictorConfig&, PredictorKind);

  PredictorKind kind_ = PredictorKind::PassiveWait;
  double anchor_time_ = 0.0;
  double sigma_m_ = 3.0;
  std::size_t window_size_ = 0;
  TrackPoint anchor_;
  std::array<AxisModel, 2> axes_;
};

// Trains on history points with t in [t0 - lookback, t0].
FittedPredictor fit(const Trajectory& history, double t0, const PredictorConfig& config, PredictorKind kind);

inline GaussianLocation predict(const FittedPredictor& p, double dt) { return p.predict(dt); }

// Maximizes the log marginal likelihood of one axis over KernelParams.
KernelParams fit_kernel(std::span<const double> times, std::span<const double> residuals, double sigma_m,
                        const FitSettings& settings);

}  // namespace geofence
