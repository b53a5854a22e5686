#pragma once

#include <functional>
#include <span>
#include <vector>

namespace geofence {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  void clamp(std::span<double> x) const;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// Nelder-Mead downhill simplex. Trial points are projected onto the box
// before evaluation; stops when the simplex value spread drops below ftol
// or after max_evals objective calls.
MinimizeResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                           std::vector<double> start, const Box& box, double initial_step, int max_evals,
                           double ftol = 1e-9);

}  // namespace geofence
