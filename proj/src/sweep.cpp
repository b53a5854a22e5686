#include "geofence/sweep.hpp"

#include <exception>
#include <ostream>

#include <fmt/format.h>
#include <omp.h>

#include "geofence/error.hpp"
#include "geofence/seed.hpp"

namespace geofence {

std::string_view to_string(SweepParam param) noexcept {
  switch (param) {
    case SweepParam::Lambda: return "lambda";
    case SweepParam::Epsilon: return "epsilon";
    case SweepParam::CellSize: return "cell_size";
    case SweepParam::Lookback: return "lookback";
    case SweepParam::SigmaM: return "sigma_m";
  }
  return "?";
}

std::optional<SweepParam> parse_sweep_param(std::string_view name) noexcept {
  for (auto p : {SweepParam::Lambda, SweepParam::Epsilon, SweepParam::CellSize, SweepParam::Lookback,
                 SweepParam::SigmaM}) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

SweepSettings with_param(SweepSettings s, SweepParam param, double value) {
  switch (param) {
    case SweepParam::Lambda: s.eval.policy.rate.lambda = value; break;
    case SweepParam::Epsilon: s.eval.policy.epsilon = value; break;
    case SweepParam::CellSize: s.cell_size = value; break;
    case SweepParam::Lookback: s.eval.predictor.lookback = value; break;
    case SweepParam::SigmaM: s.eval.predictor.sigma_m = value; break;
  }
  return s;
}

namespace {

TrajectoryOutcome score(const std::vector<MeasurementForecast>& forecasts, const SplitTrajectory& split,
                        const SweepSettings& s) {
  const FenceGrid grid = build_grid(split, s.cell_size, s.margin);
  const GridScore g = score_grid(forecasts, split.test, grid, s.eval.payoff);
  return {g.v_s, g.acts, mean_predictive_std(forecasts)};
}

// Outcomes for every sweep value of one (trajectory, method) unit. Only the
// cell size leaves the forecasts untouched, so those are reused across it.
std::vector<TrajectoryOutcome> evaluate_unit(const SplitTrajectory& split, PredictorKind method,
                                             const SweepSpec& spec, const SweepSettings& base) {
  std::vector<TrajectoryOutcome> out;
  out.reserve(spec.values.size());
  std::optional<std::vector<MeasurementForecast>> cached;
  for (double value : spec.values) {
    const SweepSettings s = with_param(base, spec.param, value);
    if (!cached || spec.param != SweepParam::CellSize) {
      const SparseSplit sparse =
          subsample_split(split, s.eval.policy.rate, derive_seed(s.master_seed, split.id));
      cached = forecast_measurements(sparse, method, s.eval);
    }
    out.push_back(score(*cached, split, s));
  }
  return out;
}

struct Unit {
  std::size_t traj;
  std::size_t method;
};

std::vector<SweepResult> reduce(std::span<const SplitTrajectory> corpus, const SweepSpec& spec,
                                const SweepSettings& settings, const std::vector<Unit>& units,
                                const std::vector<std::vector<TrajectoryOutcome>>& outcomes) {
  const std::size_t n_methods = settings.methods.size();
  std::vector<SweepResult> rows;
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      SweepResult row{spec.param, spec.values[v], settings.methods[m]};
      row.n_traj = corpus.size();
      double acts = 0.0;
      // units are laid out trajectory-major, so this walks trajectories in corpus order
      for (std::size_t u = 0; u < units.size(); ++u) {
        if (units[u].method != m) continue;
        const auto& o = outcomes[u][v];
        row.v += o.v_s;
        acts += static_cast<double>(o.acts);
        row.mean_pred_std += o.mean_pred_std;
      }
      const double n = static_cast<double>(corpus.size());
      row.v /= n;
      row.mean_acts = acts / n;
      row.mean_pred_std /= n;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<Unit> make_units(std::size_t n_traj, std::size_t n_methods) {
  std::vector<Unit> units;
  for (std::size_t t = 0; t < n_traj; ++t) {
    for (std::size_t m = 0; m < n_methods; ++m) units.push_back({t, m});
  }
  return units;
}

void check_inputs(std::span<const SplitTrajectory> corpus, const SweepSpec& spec, const SweepSettings& settings) {
  if (corpus.empty()) throw Error(Errc::ConfigError, "sweep needs a non-empty corpus");
  if (spec.values.empty()) throw Error(Errc::ConfigError, "sweep needs at least one parameter value");
  if (settings.methods.empty()) throw Error(Errc::ConfigError, "sweep needs at least one method");
}

}  // namespace

TrajectoryOutcome evaluate_trajectory(const SplitTrajectory& split, PredictorKind method,
                                      const SweepSettings& settings) {
  const SparseSplit sparse =
      subsample_split(split, settings.eval.policy.rate, derive_seed(settings.master_seed, split.id));
  return score(forecast_measurements(sparse, method, settings.eval), split, settings);
}

std::vector<SweepResult> run_sweep_serial(std::span<const SplitTrajectory> corpus, const SweepSpec& spec,
                                          const SweepSettings& settings) {
  check_inputs(corpus, spec, settings);
  const auto units = make_units(corpus.size(), settings.methods.size());
  std::vector<std::vector<TrajectoryOutcome>> outcomes;
  outcomes.reserve(units.size());
  for (const auto& u : units) {
    outcomes.push_back(evaluate_unit(corpus[u.traj], settings.methods[u.method], spec, settings));
  }
  return reduce(corpus, spec, settings, units, outcomes);
}

std::vector<SweepResult> run_sweep_parallel(std::span<const SplitTrajectory> corpus, const SweepSpec& spec,
                                            const SweepSettings& settings, int workers) {
  check_inputs(corpus, spec, settings);
  const auto units = make_units(corpus.size(), settings.methods.size());
  std::vector<std::vector<TrajectoryOutcome>> outcomes(units.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(units.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto& u = units[static_cast<std::size_t>(i)];
      outcomes[static_cast<std::size_t>(i)] = evaluate_unit(corpus[u.traj], settings.methods[u.method], spec, settings);
    } catch (...) {
#pragma omp critical(sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reduce(corpus, spec, settings, units, outcomes);
}

std::vector<SweepResult> run_sweep(std::span<const SplitTrajectory> corpus, const SweepSpec& spec,
                                   const SweepSettings& settings, int workers) {
  if (workers <= 1) return run_sweep_serial(corpus, spec, settings);
  return run_sweep_parallel(corpus, spec, settings, workers);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepResult> rows) {
  out << "param,value,method,V,n_traj,mean_acts,mean_pred_std\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{}\n", to_string(r.param), r.value, to_string(r.method), r.v, r.n_traj,
                       r.mean_acts, r.mean_pred_std);
  }
}

}  // namespace geofence
