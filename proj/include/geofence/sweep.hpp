#pragma once

// Corpus-level parameter sweeps. The serial path is the reference; the
// OpenMP path distributes (trajectory, method) units over workers and
// reduces in the same fixed order, so both produce identical bits.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geofence/evalharness.hpp"

namespace geofence {

enum class SweepParam { Lambda, Epsilon, CellSize, Lookback, SigmaM };

std::string_view to_string(SweepParam param) noexcept;
std::optional<SweepParam> parse_sweep_param(std::string_view name) noexcept;

struct SweepSpec {
  SweepParam param = SweepParam::Lambda;
  std::vector<double> values;
};

struct SweepSettings {
  EvalConfig eval;  // eval.policy.rate.lambda drives both thinning and t*
  double cell_size = 1000.0;
  double margin = 18000.0;
  std::uint64_t master_seed = 1;
  std::vector<PredictorKind> methods{kAllPredictors.begin(), kAllPredictors.end()};
};

// Settings with one parameter overridden.
SweepSettings with_param(SweepSettings settings, SweepParam param, double value);

struct SweepResult {
  SweepParam param = SweepParam::Lambda;
  double value = 0.0;
  PredictorKind method = PredictorKind::PassiveWait;
  double v = 0.0;  // mean over trajectories of the grid-summed realized value
  std::size_t n_traj = 0;
  double mean_acts = 0.0;
  double mean_pred_std = 0.0;
};

// One trajectory under one method and one setting.
struct TrajectoryOutcome {
  double v_s = 0.0;
  std::size_t acts = 0;
  double mean_pred_std = 0.0;
};

TrajectoryOutcome evaluate_trajectory(const SplitTrajectory& split, PredictorKind method,
                                      const SweepSettings& settings);

// Rows ordered by parameter value, then method.
std::vector<SweepResult> run_sweep_serial(std::span<const SplitTrajectory> corpus, const SweepSpec& spec,
                                          const SweepSettings& settings);
std::vector<SweepResult> run_sweep_parallel(std::span<const SplitTrajectory> corpus, const SweepSpec& spec,
                                            const SweepSettings& settings, int workers);

// workers <= 1 runs the serial reference.
std::vector<SweepResult> run_sweep(std::span<const SplitTrajectory> corpus, const SweepSpec& spec,
                                   const SweepSettings& settings, int workers = 1);

void write_sweep_csv(std::ostream& out, std::span<const SweepResult> rows);

}  // namespace geofence
