#include "geofence/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "geofence/error.hpp"

namespace geofence {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    auto item = trim(std::string_view(value).substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(Errc::ConfigError, fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::ConfigError, fmt::format("{}: '{}' is not an integer", key, text));
  }
  return v;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
  if (out.empty()) throw Error(Errc::ConfigError, key + ": empty list");
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_double(k, v); },
          [member](const RunConfig& c) { return fmt::format("{}", c.*member); }};
}

Field fit_number(double FitSettings::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.fit.*member = to_double(k, v); },
          [member](const RunConfig& c) { return fmt::format("{}", c.fit.*member); }};
}

Field fit_int(int FitSettings::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.fit.*member = to_int<int>(k, v); },
          [member](const RunConfig& c) { return fmt::format("{}", c.fit.*member); }};
}

Field doubles(std::vector<double> RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_doubles(k, v); },
          [member](const RunConfig& c) { return fmt::format("{}", fmt::join(c.*member, ",")); }};
}

Field text(std::string RunConfig::*member) {
  return {[member](RunConfig& c, const std::string&, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

Field strings(std::vector<std::string> RunConfig::*member) {
  return {[member](RunConfig& c, const std::string&, const std::string& v) { c.*member = split_list(v); },
          [member](const RunConfig& c) { return fmt::format("{}", fmt::join(c.*member, ",")); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"inputs", strings(&RunConfig::inputs)},
      {"seed",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_int<std::uint64_t>(k, v); },
        [](const RunConfig& c) { return fmt::format("{}", c.seed); }}},
      {"sigma_m", number(&RunConfig::sigma_m)},
      {"lookback", number(&RunConfig::lookback)},
      {"mean_mode", text(&RunConfig::mean_mode)},
      {"fit_sigma_f_min", fit_number(&FitSettings::sigma_f_min)},
      {"fit_sigma_f_max", fit_number(&FitSettings::sigma_f_max)},
      {"fit_length_min", fit_number(&FitSettings::length_min)},
      {"fit_length_max", fit_number(&FitSettings::length_max)},
      {"fit_grid", fit_int(&FitSettings::grid_points)},
      {"fit_starts", fit_int(&FitSettings::starts)},
      {"fit_max_evals", fit_int(&FitSettings::max_evals)},
      {"payoff", text(&RunConfig::payoff)},
      {"alpha", number(&RunConfig::alpha)},
      {"beta", number(&RunConfig::beta)},
      {"delta", number(&RunConfig::delta)},
      {"epsilon", number(&RunConfig::epsilon)},
      {"scan_step", number(&RunConfig::scan_step)},
      {"lambda", number(&RunConfig::lambda)},
      {"delta_t", number(&RunConfig::delta_t)},
      {"cell_size", number(&RunConfig::cell_size)},
      {"margin", number(&RunConfig::margin)},
      {"lambda_values", doubles(&RunConfig::lambda_values)},
      {"epsilon_values", doubles(&RunConfig::epsilon_values)},
      {"cell_size_values", doubles(&RunConfig::cell_size_values)},
      {"lookback_values", doubles(&RunConfig::lookback_values)},
      {"sigma_m_values", doubles(&RunConfig::sigma_m_values)},
      {"sweeps", strings(&RunConfig::sweeps)},
      {"workers",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.workers = to_int<int>(k, v); },
        [](const RunConfig& c) { return fmt::format("{}", c.workers); }}},
      {"out", text(&RunConfig::out)},
  };
  return table;
}

}  // namespace

PayoffMatrix RunConfig::payoff_matrix() const {
  if (payoff == "custom") return {alpha, beta, delta};
  if (auto preset = payoff_preset(payoff)) return *preset;
  throw Error(Errc::ConfigError, fmt::format("unknown payoff '{}' (advertising, alert-zone, custom)", payoff));
}

PredictorConfig RunConfig::predictor_config() const { return {sigma_m, lookback, fit}; }

EvalConfig RunConfig::eval_config() const {
  return {predictor_config(), payoff_matrix(), CutoffPolicy{epsilon, PoissonRate{lambda, delta_t}, scan_step}};
}

SweepSettings RunConfig::sweep_settings() const {
  SweepSettings s;
  s.eval = eval_config();
  s.cell_size = cell_size;
  s.margin = margin;
  s.master_seed = seed;
  return s;
}

const std::vector<double>& RunConfig::values_for(SweepParam param) const {
  switch (param) {
    case SweepParam::Lambda: return lambda_values;
    case SweepParam::Epsilon: return epsilon_values;
    case SweepParam::CellSize: return cell_size_values;
    case SweepParam::Lookback: return lookback_values;
    case SweepParam::SigmaM: return sigma_m_values;
  }
  return lambda_values;
}

int RunConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw Error(Errc::ConfigError, fmt::format("unknown config key '{}'", key));
  it->second.set(config, key, value);
}

void read_config(std::istream& in, RunConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ConfigError, fmt::format("line {}: expected key = value", line_no));
    }
    try {
      apply_setting(config, trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(Errc::ConfigError, fmt::format("line {}: {}", line_no, e.what()));
    }
  }
}

void load_config(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config " + path);
  read_config(in, config);
}

std::map<std::string, std::string> to_settings(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : fields()) out[key] = field.get(config);
  return out;
}

void write_config(std::ostream& out, const RunConfig& config) {
  for (const auto& [key, value] : to_settings(config)) out << key << " = " << value << '\n';
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw Error(Errc::ConfigError, what); };
  if (!(c.sigma_m > 0.0)) fail("sigma_m must be positive");
  if (!(c.lookback > 0.0)) fail("lookback must be positive");
  if (c.mean_mode != "zero" && c.mean_mode != "linear") fail("mean_mode must be 'zero' or 'linear'");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail("epsilon must be in (0, 1)");
  if (!(c.scan_step > 0.0)) fail("scan_step must be positive");
  if (!(c.lambda > 0.0) || !(c.delta_t > 0.0)) fail("lambda and delta_t must be positive");
  if (!(c.cell_size > 0.0)) fail("cell_size must be positive");
  if (!(c.margin >= 0.0)) fail("margin must be non-negative");
  if (c.fit.grid_points < 2 || c.fit.max_evals < 1) fail("fit_grid must be >= 2 and fit_max_evals >= 1");
  for (const auto& name : c.sweeps) {
    if (!parse_sweep_param(name)) fail(fmt::format("unknown sweep '{}'", name));
  }
  try {
    validate_payoff(c.payoff_matrix());
  } catch (const Error& e) {
    fail(e.what());
  }
}

}  // namespace geofence
