#pragma once

// The four CLI commands as library calls.

#include <string>
#include <vector>

#include "geofence/config.hpp"
#include "geofence/synth.hpp"

#include "json.hpp"

namespace geofence {

inline constexpr const char* kVersion = "1.0.0";

struct PreprocessOptions {
  double min_duration = 600.0;
  double min_speed = 5.0;
  double train_span = 300.0;
  double delta_t = 60.0;
};

struct PreprocessReport {
  std::vector<std::string> segment_files;
  nlohmann::json stats;
};

// Writes <out_dir>/segments/<user>_<k>.csv (local frame, origin at the last
// training point) and <out_dir>/preprocess_stats.json.
PreprocessReport cmd_preprocess(const std::string& raw_csv, const std::string& out_dir,
                                const PreprocessOptions& options = {});

// Writes the synthetic corpus as one raw CSV.
std::size_t cmd_synth(const SynthSpec& spec, const std::string& out_csv);

// Segment files from explicit paths or directories (sorted *.csv inside),
// split into train/test. Trajectory ids are file stems.
std::vector<SplitTrajectory> load_segments(const std::vector<std::string>& inputs, double train_span = 300.0);

struct SimulateOptions {
  PredictorKind method = PredictorKind::GpMeanFunc;
  Geofence fence;
};

// Per-measurement decision trace for one trajectory and one fence:
// header t_i,t_star,t_hat,p_at_act,decision,value.
RealizedScore cmd_simulate(const SplitTrajectory& split, const RunConfig& config, const SimulateOptions& options,
                           const std::string& out_csv);

// Runs every configured sweep and writes sweep_<param>.csv, the t* table
// for the epsilon sweep, and manifest.json under config.out.
std::vector<std::string> cmd_sweep(const std::vector<SplitTrajectory>& corpus, const RunConfig& config);

// t*(epsilon, lambda) table: header epsilon,lambda,t_star.
void write_cutoff_table(std::ostream& out, const std::vector<double>& epsilons, const std::vector<double>& lambdas,
                        double delta_t);

// 64-bit FNV-1a digest of a file's bytes, as hex.
std::string file_digest(const std::string& path);

}  // namespace geofence
