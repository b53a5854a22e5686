#include "geofence/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geofence {

void Box::clamp(std::span<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

MinimizeResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                           std::vector<double> start, const Box& box, double initial_step, int max_evals,
                           double ftol) {
  const std::size_t n = start.size();
  int evals = 0;
  auto eval = [&](std::vector<double>& x) {
    box.clamp(x);
    ++evals;
    const double f = objective(x);
    return std::isnan(f) ? INFINITY : f;
  };

  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  values[0] = eval(simplex[0]);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = simplex[i + 1];
    // step inward if the vertex would sit outside the box
    v[i] += (v[i] + initial_step <= box.upper[i]) ? initial_step : -initial_step;
    values[i + 1] = eval(v);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::isfinite(values[worst]) && values[worst] - values[best] < ftol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k : order) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / static_cast<double>(n);
    }
    auto along = [&](std::vector<double>& out, double coef) {
      for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + coef * (simplex[worst][i] - centroid[i]);
    };

    along(trial, -1.0);
    const double reflected = eval(trial);
    if (reflected < values[best]) {
      along(trial2, -2.0);
      const double expanded = evals < max_evals ? eval(trial2) : INFINITY;
      if (expanded < reflected) {
        simplex[worst] = trial2;
        values[worst] = expanded;
      } else {
        simplex[worst] = trial;
        values[worst] = reflected;
      }
      continue;
    }
    if (reflected < values[second]) {
      simplex[worst] = trial;
      values[worst] = reflected;
      continue;
    }
    const bool outside = reflected < values[worst];
    along(trial2, outside ? -0.5 : 0.5);
    if (evals >= max_evals) break;
    const double contracted = eval(trial2);
    if (contracted < std::min(reflected, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = contracted;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t k = 0; k <= n && evals < max_evals; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i) simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
      values[k] = eval(simplex[k]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evals};
}

}  // namespace geofence
