#include "geofence/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "geofence/error.hpp"
#include "geofence/optimize.hpp"

namespace geofence {

std::string_view to_string(PredictorKind kind) noexcept {
  switch (kind) {
    case PredictorKind::PassiveWait: return "PW";
    case PredictorKind::Gp: return "GP";
    case PredictorKind::GpMeanFunc: return "GP+meanfunc";
  }
  return "?";
}

std::optional<PredictorKind> parse_predictor_kind(std::string_view name) noexcept {
  for (auto kind : kAllPredictors) {
    if (name == to_string(kind)) return kind;
  }
  if (name == "pw") return PredictorKind::PassiveWait;
  if (name == "gp") return PredictorKind::Gp;
  if (name == "gp-meanfunc" || name == "gp+meanfunc") return PredictorKind::GpMeanFunc;
  return std::nullopt;
}

namespace {

LinearMean line_through(double t1, double v1, double t2, double v2) {
  if (to_millis(t1) == to_millis(t2)) {
    throw Error(Errc::DegenerateMean, fmt::format("two points share timestamp {}", t2));
  }
  const double slope = (v2 - v1) / (t2 - t1);
  return {slope, v2, t2};
}

AxisLinearMeans means_through(const TrackPoint& a, const TrackPoint& b) {
  return {line_through(a.t, a.x, b.t, b.x), line_through(a.t, a.y, b.t, b.y)};
}

double safe_lml(std::span<const double> times, std::span<const double> values, const KernelParams& p,
                double sigma_m) {
  try {
    return log_marginal_likelihood(times, values, p, sigma_m);
  } catch (const Error& e) {
    if (e.code() == Errc::IllConditioned) return -std::numeric_limits<double>::infinity();
    throw;
  }
}

}  // namespace

AxisLinearMeans linear_mean(const Trajectory& history, double t0) {
  const std::int64_t cutoff = to_millis(t0);
  const auto end = std::find_if(history.points.begin(), history.points.end(),
                                [&](const TrackPoint& p) { return to_millis(p.t) > cutoff; });
  if (end - history.points.begin() < 2) {
    throw Error(Errc::DegenerateMean, "linear mean needs two points at or before the anchor");
  }
  return means_through(*(end - 2), *(end - 1));
}

KernelParams fit_kernel(std::span<const double> times, std::span<const double> residuals, double sigma_m,
                        const FitSettings& s) {
  // Search in [0,1]^2, mapped log-linearly onto the parameter bounds.
  const double lf0 = std::log(s.sigma_f_min), lf1 = std::log(s.sigma_f_max);
  const double ll0 = std::log(s.length_min), ll1 = std::log(s.length_max);
  auto params_at = [&](std::span<const double> u) {
    return KernelParams{std::exp(lf0 + u[0] * (lf1 - lf0)), std::exp(ll0 + u[1] * (ll1 - ll0))};
  };
  auto objective = [&](std::span<const double> u) { return -safe_lml(times, residuals, params_at(u), sigma_m); };

  struct Candidate {
    std::vector<double> u;
    double value;
  };
  std::vector<Candidate> grid;
  const int g = std::max(s.grid_points, 2);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      std::vector<double> u = {static_cast<double>(i) / (g - 1), static_cast<double>(j) / (g - 1)};
      const double v = objective(u);
      grid.push_back({std::move(u), v});
    }
  }
  std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.value < b.value; });

  Candidate best = grid.front();
  const int starts = std::clamp(s.starts, 0, static_cast<int>(grid.size()));
  const int budget = starts > 0 ? (s.max_evals - g * g) / starts : 0;
  const Box box{{0.0, 0.0}, {1.0, 1.0}};
  for (int k = 0; k < starts && budget > 2; ++k) {
    if (!std::isfinite(grid[static_cast<std::size_t>(k)].value)) break;
    auto result = nelder_mead(objective, grid[static_cast<std::size_t>(k)].u, box, 0.5 / (g - 1), budget);
    if (result.value < best.value) best = {std::move(result.x), result.value};
  }
  if (!std::isfinite(best.value)) {
    throw Error(Errc::IllConditioned, "no kernel parameters gave a positive definite covariance");
  }
  return params_at(best.u);
}

FittedPredictor fit(const Trajectory& history, double t0, const PredictorConfig& config, PredictorKind kind) {
  const std::int64_t hi = to_millis(t0);
  const std::int64_t lo = hi - to_millis(config.lookback);
  std::vector<TrackPoint> window;
  for (const auto& p : history.points) {
    const auto ms = to_millis(p.t);
    if (ms >= lo && ms <= hi) window.push_back(p);
  }
  if (window.empty()) {
    throw Error(Errc::NoTrainingData, fmt::format("no measurements in [{}, {}]", t0 - config.lookback, t0));
  }

  FittedPredictor out;
  out.kind_ = kind;
  out.anchor_time_ = t0;
  out.sigma_m_ = config.sigma_m;
  out.window_size_ = window.size();
  out.anchor_ = window.back();
  if (kind == PredictorKind::PassiveWait) return out;

  AxisLinearMeans means{{0.0, 0.0, t0}, {0.0, 0.0, t0}};
  if (kind == PredictorKind::GpMeanFunc) {
    if (window.size() >= 2) {
      means = means_through(window[window.size() - 2], window.back());
    } else {
      means = {{0.0, window.back().x, window.back().t}, {0.0, window.back().y, window.back().t}};
    }
  }

  std::vector<double> times(window.size());
  std::vector<double> residuals(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) times[i] = window[i].t - t0;
  for (int axis = 0; axis < 2; ++axis) {
    const LinearMean& m = axis == 0 ? means.x : means.y;
    for (std::size_t i = 0; i < window.size(); ++i) {
      const double value = axis == 0 ? window[i].x : window[i].y;
      residuals[i] = value - m(window[i].t);
    }
    const KernelParams params = fit_kernel(times, residuals, config.sigma_m, config.fit);
    auto& model = out.axes_[static_cast<std::size_t>(axis)];
    model.mean = m;
    model.gp.emplace(times, residuals, params, config.sigma_m);
  }
  return out;
}

GaussianLocation FittedPredictor::predict(double dt) const {
  if (kind_ == PredictorKind::PassiveWait) return {anchor_.x, anchor_.y, sigma_m_, sigma_m_};
  std::array<double, 2> mean{}, sd{};
  const double noise = sigma_m_ * sigma_m_;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const auto& model = axes_[axis];
    const Moments post = model.gp->posterior(dt);
    mean[axis] = model.mean(anchor_time_ + dt) + post.mean;
    sd[axis] = std::sqrt(post.variance + noise);
  }
  return {mean[0], mean[1], sd[0], sd[1]};
}

nlohmann::json FittedPredictor::to_json() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind_));
  j["anchor_time"] = anchor_time_;
  j["sigma_m"] = sigma_m_;
  j["window_size"] = window_size_;
  j["anchor"] = {{"t", anchor_.t}, {"x", anchor_.x}, {"y", anchor_.y}};
  if (kind_ != PredictorKind::PassiveWait) {
    auto& axes = j["axes"] = nlohmann::json::array();
    for (const auto& model : axes_) {
      axes.push_back({{"sigma_f", model.gp->params().sigma_f},
                      {"length_scale", model.gp->params().length_scale},
                      {"jitter", model.gp->jitter()},
                      {"log_marginal_likelihood", model.gp->log_marginal_likelihood()},
                      {"mean_slope", model.mean.slope},
                      {"mean_intercept", model.mean.intercept()}});
    }
  }
  return j;
}

}  // namespace geofence
