#include "geofence/decide.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geofence/error.hpp"

namespace geofence {

std::optional<PayoffMatrix> payoff_preset(std::string_view name) noexcept {
  if (name == "advertising") return PayoffMatrix::advertising();
  if (name == "alert-zone") return PayoffMatrix::alert_zone();
  return std::nullopt;
}

bool validate_payoff(const PayoffMatrix& payoff) {
  if (!(payoff.delta + payoff.alpha - payoff.beta < 0.0)) {
    throw Error(Errc::InvalidPayoff, fmt::format("need delta + alpha - beta < 0, got alpha={} beta={} delta={}",
                                                 payoff.alpha, payoff.beta, payoff.delta));
  }
  return payoff.beta > 0.0 && payoff.alpha <= 0.0 && payoff.delta <= 0.0;
}

void validate_policy(const CutoffPolicy& policy) {
  if (!(policy.epsilon > 0.0 && policy.epsilon < 1.0)) {
    throw Error(Errc::ConfigError, fmt::format("epsilon must be in (0, 1), got {}", policy.epsilon));
  }
  if (!(policy.scan_step > 0.0)) throw Error(Errc::ConfigError, "scan step must be positive");
  if (!(policy.rate.lambda > 0.0) || !(policy.rate.delta_t > 0.0)) {
    throw Error(Errc::InvalidRate, fmt::format("lambda={} delta_t={}", policy.rate.lambda, policy.rate.delta_t));
  }
}

double axis_mass(double lo, double hi, double mean, double sd) noexcept {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const double a = (lo - mean) / sd * inv_sqrt2;
  const double b = (hi - mean) / sd * inv_sqrt2;
  // Work in whichever tail keeps the subtraction well conditioned.
  if (a >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (b <= 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 1.0 - 0.5 * std::erfc(b) - 0.5 * std::erfc(-a);
}

double prob_inside(const GaussianLocation& loc, const Geofence& fence) noexcept {
  return axis_mass(fence.x_lo(), fence.x_hi(), loc.mean_x, loc.std_x) *
         axis_mass(fence.y_lo(), fence.y_hi(), loc.mean_y, loc.std_y);
}

ExpectedValues expected_values(double p, const PayoffMatrix& payoff) noexcept {
  return {payoff.alpha * p, payoff.beta * p + payoff.delta * (1.0 - p)};
}

double act_threshold(const PayoffMatrix& payoff) {
  validate_payoff(payoff);
  return payoff.delta / (payoff.delta + payoff.alpha - payoff.beta);
}

double poisson_cutoff(const CutoffPolicy& policy) {
  validate_policy(policy);
  return -std::log(policy.epsilon) / policy.rate.lambda * policy.rate.delta_t;
}

double prob_measurement_by(const CutoffPolicy& policy, double t) {
  return -std::expm1(-policy.rate.lambda * t / policy.rate.delta_t);
}

std::size_t scan_count(const CutoffPolicy& policy) {
  const double t_star = poisson_cutoff(policy);
  auto count = static_cast<std::size_t>(std::floor(t_star / policy.scan_step)) + 1;
  while (count > 1 && static_cast<double>(count - 1) * policy.scan_step > t_star) --count;
  while (static_cast<double>(count) * policy.scan_step <= t_star) ++count;
  return count;
}

DecisionOutcome find_act_time(const FittedPredictor& pred, const Geofence& fence, const PayoffMatrix& payoff,
                              const CutoffPolicy& policy) {
  const double threshold = act_threshold(payoff);
  DecisionOutcome out;
  out.t_star = poisson_cutoff(policy);
  const std::size_t steps = scan_count(policy);
  for (std::size_t k = 0; k < steps; ++k) {
    const double dt = static_cast<double>(k) * policy.scan_step;
    const double p = prob_inside(pred.predict(dt), fence);
    out.scanned_steps = k + 1;
    if (p > threshold) {
      out.t_hat = dt;
      out.p_at_act = p;
      return out;
    }
  }
  return out;
}

}  // namespace geofence
