// geofence: preprocess / synth / simulate / sweep.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "geofence/commands.hpp"
#include "geofence/error.hpp"

namespace gf = geofence;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

int exit_code(gf::Errc code) {
  switch (code) {
    case gf::Errc::ConfigError:
    case gf::Errc::InvalidPayoff:
      return kUsage;
    case gf::Errc::IllConditioned:
      return kNumeric;
    default:
      return kData;
  }
}

// Flags that mirror config keys. Only flags given on the command line are
// applied, on top of defaults and the optional --config file.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<CLI::Option*> options;
  std::vector<std::string> keys;

  void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
    options.push_back(app.add_option(flag, values[key], help));
    keys.push_back(key);
  }

  gf::RunConfig resolve() const {
    gf::RunConfig config;
    if (!config_file.empty()) gf::load_config(config_file, config);
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i]->count() > 0) gf::apply_setting(config, keys[i], values.at(keys[i]));
    }
    return config;
  }
};

void add_model_flags(CLI::App& app, ConfigFlags& flags) {
  app.add_option("--config", flags.config_file, "key = value config file")->check(CLI::ExistingFile);
  flags.add(app, "--seed", "seed", "master seed");
  flags.add(app, "--lambda", "lambda", "Poisson measurement rate per --delta-t window");
  flags.add(app, "--delta-t", "delta_t", "rate window, seconds");
  flags.add(app, "--epsilon", "epsilon", "cutoff probability");
  flags.add(app, "--cell-size", "cell_size", "geofence side, meters");
  flags.add(app, "--lookback", "lookback", "GP training window, seconds");
  flags.add(app, "--sigma-m", "sigma_m", "measurement noise std, meters");
  flags.add(app, "--payoff", "payoff", "advertising | alert-zone | custom");
  flags.add(app, "--alpha", "alpha", "custom payoff: wait, in");
  flags.add(app, "--beta", "beta", "custom payoff: act, in");
  flags.add(app, "--delta", "delta", "custom payoff: act, out");
  flags.add(app, "--mean-mode", "mean_mode", "zero | linear");
  flags.add(app, "--scan-step", "scan_step", "act-time scan step, seconds");
}

std::vector<gf::MotionKind> parse_kinds(const std::string& list) {
  std::vector<gf::MotionKind> kinds;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto name = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto kind = gf::parse_motion_kind(name);
    if (!kind) throw gf::Error(gf::Errc::ConfigError, fmt::format("unknown motion kind '{}'", name));
    kinds.push_back(*kind);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return kinds;
}

gf::PredictorKind method_for(const std::string& method, const gf::RunConfig& config) {
  if (!method.empty()) {
    const auto kind = gf::parse_predictor_kind(method);
    if (!kind) throw gf::Error(gf::Errc::ConfigError, fmt::format("unknown method '{}'", method));
    return *kind;
  }
  return config.mean_mode == "zero" ? gf::PredictorKind::Gp : gf::PredictorKind::GpMeanFunc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geofence activation from sparse location measurements"};
  app.set_version_flag("--version", gf::kVersion);
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "raw user_id,t,lat,lon CSV -> local-frame segment files");
  std::string pre_input;
  std::string pre_out = "out";
  gf::PreprocessOptions pre_opts;
  pre->add_option("input", pre_input, "raw fixes CSV")->required();
  pre->add_option("--out", pre_out, "output directory");
  pre->add_option("--min-duration", pre_opts.min_duration, "seconds");
  pre->add_option("--min-speed", pre_opts.min_speed, "m/s");
  pre->add_option("--train-span", pre_opts.train_span, "seconds");
  pre->add_option("--delta-t", pre_opts.delta_t, "rate window for lambda estimates, seconds");

  // synth
  auto* syn = app.add_subcommand("synth", "write a synthetic raw corpus");
  gf::SynthSpec spec;
  std::string syn_kinds = "constant";
  std::string syn_out = "synth.csv";
  double heading = 0.0;
  syn->add_option("--kinds", syn_kinds, "comma list of constant, turning, stop-and-go (cycled)");
  syn->add_option("--count", spec.count, "number of tracks");
  syn->add_option("--duration", spec.duration, "seconds");
  syn->add_option("--tau", spec.tau, "sampling interval, seconds");
  syn->add_option("--speed-min", spec.speed_min, "m/s");
  syn->add_option("--speed-max", spec.speed_max, "m/s");
  auto* heading_opt = syn->add_option("--heading", heading, "degrees clockwise from north (random if unset)");
  syn->add_option("--jitter", spec.jitter, "Gaussian position noise std, meters");
  syn->add_option("--origin-lat", spec.origin.lat);
  syn->add_option("--origin-lon", spec.origin.lon);
  syn->add_option("--start-time", spec.start_time, "unix seconds");
  syn->add_option("--seed", spec.seed);
  syn->add_option("--out", syn_out, "output CSV");

  // simulate
  auto* sim = app.add_subcommand("simulate", "decision trace for one trajectory and one fence");
  ConfigFlags sim_flags;
  std::string sim_input;
  std::string sim_traj;
  std::string sim_method;
  std::string sim_out = "trace.csv";
  double fence_x = 0.0;
  double fence_y = 0.0;
  sim->add_option("input", sim_input, "segment CSV or directory")->required();
  add_model_flags(*sim, sim_flags);
  sim->add_option("--trajectory", sim_traj, "segment id (file stem) when input is a directory");
  sim->add_option("--method", sim_method, "PW | GP | GP+meanfunc (default from --mean-mode)");
  sim->add_option("--fence-x", fence_x, "fence center x, meters");
  sim->add_option("--fence-y", fence_y, "fence center y, meters");
  sim->add_option("--out", sim_out, "trace CSV");

  // sweep
  auto* swp = app.add_subcommand("sweep", "parameter sweeps over a segment corpus");
  ConfigFlags swp_flags;
  std::vector<std::string> swp_inputs;
  swp->add_option("inputs", swp_inputs, "segment CSVs or directories");
  add_model_flags(*swp, swp_flags);
  swp_flags.add(*swp, "--sweeps", "sweeps", "comma list of lambda, epsilon, cell_size, lookback, sigma_m");
  swp_flags.add(*swp, "--lambda-values", "lambda_values", "comma list");
  swp_flags.add(*swp, "--epsilon-values", "epsilon_values", "comma list");
  swp_flags.add(*swp, "--cell-size-values", "cell_size_values", "comma list");
  swp_flags.add(*swp, "--lookback-values", "lookback_values", "comma list");
  swp_flags.add(*swp, "--sigma-m-values", "sigma_m_values", "comma list");
  swp_flags.add(*swp, "--margin", "margin", "grid margin around the test trajectory, meters");
  swp_flags.add(*swp, "--workers", "workers", "threads (0 = hardware threads)");
  swp_flags.add(*swp, "--out", "out", "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (pre->parsed()) {
      const auto report = gf::cmd_preprocess(pre_input, pre_out, pre_opts);
      std::cout << fmt::format("{} segment(s) written to {}\n", report.segment_files.size(), pre_out);
    } else if (syn->parsed()) {
      spec.kinds = parse_kinds(syn_kinds);
      if (heading_opt->count() > 0) spec.heading_deg = heading;
      const auto n = gf::cmd_synth(spec, syn_out);
      std::cout << fmt::format("{} fixes written to {}\n", n, syn_out);
    } else if (sim->parsed()) {
      const gf::RunConfig config = sim_flags.resolve();
      gf::validate(config);
      const auto corpus = gf::load_segments({sim_input});
      if (corpus.empty()) throw gf::Error(gf::Errc::EmptyTrajectory, "no segments in " + sim_input);
      const gf::SplitTrajectory* split = &corpus.front();
      if (!sim_traj.empty()) {
        split = nullptr;
        for (const auto& s : corpus) {
          if (s.id == sim_traj) split = &s;
        }
        if (!split) throw gf::Error(gf::Errc::ConfigError, "no segment named " + sim_traj);
      }
      gf::SimulateOptions options;
      options.method = method_for(sim_method, config);
      options.fence = {fence_x, fence_y, config.cell_size / 2.0};
      const auto score = gf::cmd_simulate(*split, config, options, sim_out);
      std::cout << fmt::format("{}: V = {} over {} measurement(s), trace in {}\n", split->id, score.v_fence_traj,
                               score.trace.size(), sim_out);
    } else if (swp->parsed()) {
      gf::RunConfig config = swp_flags.resolve();
      if (!swp_inputs.empty()) config.inputs = swp_inputs;
      if (config.inputs.empty()) throw gf::Error(gf::Errc::ConfigError, "sweep needs input segments");
      gf::validate(config);
      const auto corpus = gf::load_segments(config.inputs);
      if (corpus.empty()) throw gf::Error(gf::Errc::EmptyTrajectory, "no segments to sweep");
      for (const auto& path : gf::cmd_sweep(corpus, config)) std::cout << path << '\n';
    }
  } catch (const gf::Error& e) {
    std::cerr << "geofence: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "geofence: internal error: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
