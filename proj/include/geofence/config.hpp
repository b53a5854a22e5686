#pragma once

// Run configuration: flat `key = value` text with `#` comments. Every key
// mirrors a RunConfig field; command-line flags are applied on top.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "geofence/evalharness.hpp"
#include "geofence/sweep.hpp"

namespace geofence {

struct RunConfig {
  std::vector<std::string> inputs;
  std::uint64_t seed = 1;

  double sigma_m = 3.0;
  double lookback = 300.0;
  std::string mean_mode = "linear";  // zero | linear
  FitSettings fit;

  std::string payoff = "advertising";  // preset name, or "custom" for alpha/beta/delta
  double alpha = -0.5;
  double beta = 1.0;
  double delta = -0.25;
  double epsilon = 0.2;
  double scan_step = 1.0;

  double lambda = 0.5;
  double delta_t = 60.0;
  double cell_size = 1000.0;
  double margin = 18000.0;

  std::vector<double> lambda_values{0.25, 0.5, 1, 2, 4, 8};
  std::vector<double> epsilon_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> cell_size_values{500, 1000, 1500, 2000, 2500};
  std::vector<double> lookback_values{200, 300, 400, 500, 600};
  std::vector<double> sigma_m_values{3, 10, 30, 100, 300, 500};
  std::vector<std::string> sweeps{"lambda", "epsilon", "cell_size", "lookback", "sigma_m"};

  int workers = 0;  // 0 = hardware threads
  std::string out = "out";

  PayoffMatrix payoff_matrix() const;
  PredictorConfig predictor_config() const;
  EvalConfig eval_config() const;
  SweepSettings sweep_settings() const;
  const std::vector<double>& values_for(SweepParam param) const;
  int resolved_workers() const;
};

// Applies one key; throws ConfigError for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

void read_config(std::istream& in, RunConfig& config);
void load_config(const std::string& path, RunConfig& config);

// Canonical key/value echo; reading it back yields the same configuration.
std::map<std::string, std::string> to_settings(const RunConfig& config);
void write_config(std::ostream& out, const RunConfig& config);

// Validates cross-field constraints (payoff regime, epsilon range, ...).
void validate(const RunConfig& config);

}  // namespace geofence
