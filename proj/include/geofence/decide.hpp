#pragma once

// The act/wait decision: probability of being inside a square geofence,
// expected payoffs, the act threshold, the Poisson prediction cutoff t*, and
// the forward scan for the first act time.

#include <limits>
#include <optional>
#include <string_view>

#include "geofence/predict.hpp"
#include "geofence/trajdata.hpp"

namespace geofence {

struct Geofence {
  double center_x = 0.0;
  double center_y = 0.0;
  double half_width = 500.0;

  double x_lo() const noexcept { return center_x - half_width; }
  double x_hi() const noexcept { return center_x + half_width; }
  double y_lo() const noexcept { return center_y - half_width; }
  double y_hi() const noexcept { return center_y + half_width; }

  // Half-open [lo, hi) on both axes.
  bool contains(double x, double y) const noexcept {
    return x >= x_lo() && x < x_hi() && y >= y_lo() && y < y_hi();
  }
};

// Values of wait/act x in/out; wait-while-out is fixed at zero.
struct PayoffMatrix {
  double alpha = -0.5;  // wait, in
  double beta = 1.0;    // act, in
  double delta = -0.25;  // act, out

  static PayoffMatrix advertising() noexcept { return {-0.5, 1.0, -0.25}; }
  static PayoffMatrix alert_zone() noexcept { return {-2.0, 1.0, -0.25}; }
};

std::optional<PayoffMatrix> payoff_preset(std::string_view name) noexcept;

// Throws InvalidPayoff unless delta + alpha - beta < 0. Returns false when
// the matrix leaves the usual regime (beta > 0, alpha <= 0, delta <= 0).
bool validate_payoff(const PayoffMatrix& payoff);

struct CutoffPolicy {
  double epsilon = 0.2;
  PoissonRate rate;
  double scan_step = 1.0;  // seconds
};

void validate_policy(const CutoffPolicy& policy);

struct ExpectedValues {
  double wait = 0.0;
  double act = 0.0;
};

struct DecisionOutcome {
  static constexpr double kNever = std::numeric_limits<double>::infinity();

  double t_hat = kNever;  // seconds after the anchor
  double t_star = 0.0;
  double p_at_act = 0.0;
  std::size_t scanned_steps = 0;

  bool acts() const noexcept { return t_hat != kNever; }
};

// Gaussian mass of [lo, hi] along one axis.
double axis_mass(double lo, double hi, double mean, double sd) noexcept;

double prob_inside(const GaussianLocation& loc, const Geofence& fence) noexcept;

ExpectedValues expected_values(double p, const PayoffMatrix& payoff) noexcept;

// delta / (delta + alpha - beta); act iff p exceeds it.
double act_threshold(const PayoffMatrix& payoff);

// -ln(epsilon) / lambda, in seconds.
double poisson_cutoff(const CutoffPolicy& policy);

// P(at least one measurement within t seconds).
double prob_measurement_by(const CutoffPolicy& policy, double t);

// Scans dt = 0, step, 2 step, ... <= t* for the first dt whose inside
// probability strictly exceeds the act threshold.
DecisionOutcome find_act_time(const FittedPredictor& pred, const Geofence& fence, const PayoffMatrix& payoff,
                              const CutoffPolicy& policy);

// Number of scan points in [0, t*].
std::size_t scan_count(const CutoffPolicy& policy);

}  // namespace geofence
