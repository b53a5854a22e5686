#include "geofence/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "geofence/error.hpp"
#include "geofence/seed.hpp"

namespace fs = std::filesystem;

namespace geofence {

namespace {

std::string sanitize(std::string_view id) {
  std::string out(id);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out.empty() ? std::string("user") : out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  return out;
}

std::vector<fs::path> resolve_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    fs::path p(input);
    if (fs::is_directory(p)) {
      if (fs::is_directory(p / "segments")) p /= "segments";
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw Error(Errc::IoError, "no such input: " + input);
    }
  }
  return files;
}

std::string format_time(double t) {
  return t == DecisionOutcome::kNever ? std::string("NEVER") : fmt::format("{}", t);
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fmt::format("{:016x}", fnv1a(bytes));
}

PreprocessReport cmd_preprocess(const std::string& raw_csv, const std::string& out_dir,
                                const PreprocessOptions& options) {
  const auto fixes = load_csv(raw_csv);
  const fs::path out(out_dir);
  const fs::path seg_dir = out / "segments";
  ensure_dir(seg_dir);

  PreprocessReport report;
  auto& users = report.stats["users"] = nlohmann::json::array();
  auto& segments = report.stats["segments"] = nlohmann::json::array();
  for (const auto& group : group_by_user(fixes)) {
    const std::string& user = group.front().user_id;
    nlohmann::json user_stats = {{"user_id", user}, {"n_fixes", group.size()}, {"tau", nullptr}, {"segments", 0}};
    if (group.size() < 2) {
      users.push_back(std::move(user_stats));
      continue;
    }
    Trajectory traj = project_to_local(group, {group.front().lat, group.front().lon});
    traj.id = user;
    const double tau = dominant_gap(traj);
    const auto kept = filter_short(split_on_gap(traj, tau), options.min_duration, options.min_speed);
    user_stats["tau"] = tau;
    user_stats["segments"] = kept.size();
    users.push_back(std::move(user_stats));

    for (std::size_t k = 0; k < kept.size(); ++k) {
      const SplitTrajectory split = train_test_split(kept[k], options.train_span);
      Trajectory local;
      local.points = split.train.points;
      local.points.insert(local.points.end(), split.test.points.begin(), split.test.points.end());
      const std::string name = fmt::format("{}_{}.csv", sanitize(user), k);
      write_local_csv(local, (seg_dir / name).string());
      report.segment_files.push_back((seg_dir / name).string());
      segments.push_back({{"file", name},
                          {"user_id", user},
                          {"tau", tau},
                          {"n_points", kept[k].size()},
                          {"duration", kept[k].duration()},
                          {"lambda_hat", estimate_lambda(kept[k], options.delta_t).lambda},
                          {"origin", {{"lat", split.train.origin->lat}, {"lon", split.train.origin->lon}}},
                          {"n_train", split.train.size()},
                          {"n_test", split.test.size()}});
    }
  }
  report.stats["n_segments"] = report.segment_files.size();
  report.stats["input"] = {{"path", raw_csv}, {"fnv1a64", file_digest(raw_csv)}};
  {
    auto stats_out = open_out(out / "preprocess_stats.json");
    stats_out << report.stats.dump(2) << '\n';
  }
  return report;
}

std::size_t cmd_synth(const SynthSpec& spec, const std::string& out_csv) {
  const auto fixes = synthesize(spec);
  const fs::path path(out_csv);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  write_csv(fixes, out_csv);
  return fixes.size();
}

std::vector<SplitTrajectory> load_segments(const std::vector<std::string>& inputs, double train_span) {
  std::vector<SplitTrajectory> corpus;
  for (const auto& file : resolve_inputs(inputs)) {
    Trajectory traj = load_local_csv(file.string());
    traj.id = file.stem().string();
    traj.gap = dominant_gap(traj);
    SplitTrajectory split = train_test_split(traj, train_span);
    split.id = traj.id;
    corpus.push_back(std::move(split));
  }
  return corpus;
}

RealizedScore cmd_simulate(const SplitTrajectory& split, const RunConfig& config, const SimulateOptions& options,
                           const std::string& out_csv) {
  validate(config);
  const EvalConfig eval = config.eval_config();
  const SparseSplit sparse = subsample_split(split, eval.policy.rate, derive_seed(config.seed, split.id));
  RealizedScore score = score_fence_trajectory(sparse, split.test, options.fence, options.method, eval);

  const fs::path path(out_csv);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  auto out = open_out(path);
  out << "t_i,t_star,t_hat,p_at_act,decision,value\n";
  for (std::size_t i = 0; i < score.trace.size(); ++i) {
    const auto& step = score.trace[i];
    const bool latched = score.latched_at && i > *score.latched_at;
    if (latched) {
      out << fmt::format("{},,,,latched,{}\n", step.t_i, step.value);
      continue;
    }
    const char* decision = step.t_hat_abs <= step.t_next ? "act" : "wait";
    out << fmt::format("{},{},{},{},{},{}\n", step.t_i, step.decision.t_star, format_time(step.t_hat_abs),
                       step.decision.p_at_act, decision, step.value);
  }
  return score;
}

void write_cutoff_table(std::ostream& out, const std::vector<double>& epsilons, const std::vector<double>& lambdas,
                        double delta_t) {
  out << "epsilon,lambda,t_star\n";
  for (double eps : epsilons) {
    for (double lambda : lambdas) {
      const double t_star = poisson_cutoff({eps, PoissonRate{lambda, delta_t}, 1.0});
      out << fmt::format("{},{},{}\n", eps, lambda, t_star);
    }
  }
}

std::vector<std::string> cmd_sweep(const std::vector<SplitTrajectory>& corpus, const RunConfig& config) {
  validate(config);
  const fs::path out(config.out);
  ensure_dir(out);
  const SweepSettings settings = config.sweep_settings();
  const int workers = config.resolved_workers();

  nlohmann::json manifest;
  manifest["command"] = "sweep";
  manifest["version"] = kVersion;
  manifest["config"] = to_settings(config);
  manifest["master_seed"] = config.seed;
  manifest["workers"] = workers;
  auto& seeds = manifest["trajectory_seeds"] = nlohmann::json::object();
  for (const auto& split : corpus) seeds[split.id] = derive_seed(config.seed, split.id);
  auto& inputs = manifest["inputs"] = nlohmann::json::array();
  for (const auto& file : resolve_inputs(config.inputs)) {
    inputs.push_back({{"path", file.string()}, {"fnv1a64", file_digest(file.string())}});
  }

  std::vector<std::string> written;
  auto& timings = manifest["timings_seconds"] = nlohmann::json::object();
  for (const auto& name : config.sweeps) {
    const SweepParam param = *parse_sweep_param(name);
    const auto start = std::chrono::steady_clock::now();
    const auto rows = run_sweep(corpus, {param, config.values_for(param)}, settings, workers);
    timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path csv = out / fmt::format("sweep_{}.csv", name);
    {
      auto csv_out = open_out(csv);
      write_sweep_csv(csv_out, rows);
    }
    written.push_back(csv.string());
    if (param == SweepParam::Epsilon) {
      const fs::path table = out / "cutoff_table.csv";
      {
        auto table_out = open_out(table);
        write_cutoff_table(table_out, config.epsilon_values, config.lambda_values, config.delta_t);
      }
      written.push_back(table.string());
    }
  }
  auto& outputs = manifest["outputs"] = nlohmann::json::array();
  for (const auto& file : written) outputs.push_back({{"path", file}, {"fnv1a64", file_digest(file)}});
  {
    auto manifest_out = open_out(out / "manifest.json");
    manifest_out << manifest.dump(2) << '\n';
  }
  written.push_back((out / "manifest.json").string());
  return written;
}

}  // namespace geofence
