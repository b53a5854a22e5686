#include "geofence/trajdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <fmt/format.h>

#include "geofence/error.hpp"

namespace geofence {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool valid_geo(GeoPoint p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line, const char* name) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError(line, fmt::format("invalid {} '{}'", name, field));
  }
  return value;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double axis_distance(const TrackPoint& a, const TrackPoint& b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

std::int64_t to_millis(double seconds) noexcept { return std::llround(seconds * 1000.0); }

TrackPoint project(GeoPoint p, GeoPoint origin, double t) noexcept {
  const double x = kEarthRadiusMeters * (p.lon - origin.lon) * kDegToRad * std::cos(origin.lat * kDegToRad);
  const double y = kEarthRadiusMeters * (p.lat - origin.lat) * kDegToRad;
  return {t, x, y};
}

GeoPoint unproject(const TrackPoint& p, GeoPoint origin) noexcept {
  const double lat = origin.lat + p.y / (kEarthRadiusMeters * kDegToRad);
  const double lon = origin.lon + p.x / (kEarthRadiusMeters * kDegToRad * std::cos(origin.lat * kDegToRad));
  return {lat, lon};
}

Trajectory project_to_local(std::span<const RawFix> fixes, GeoPoint origin) {
  if (fixes.empty()) throw Error(Errc::EmptyTrajectory, "no fixes to project");
  Trajectory traj;
  traj.id = fixes.front().user_id;
  traj.origin = origin;
  traj.points.reserve(fixes.size());
  for (std::size_t i = 0; i < fixes.size(); ++i) {
    if (i > 0 && to_millis(fixes[i].t) <= to_millis(fixes[i - 1].t)) {
      throw Error(Errc::DuplicateTimestamp,
                  fmt::format("user '{}': timestamp {} not after {}", fixes[i].user_id, fixes[i].t, fixes[i - 1].t));
    }
    traj.points.push_back(project({fixes[i].lat, fixes[i].lon}, origin, fixes[i].t));
  }
  return traj;
}

double dominant_gap(const Trajectory& traj) {
  if (traj.size() < 2) throw Error(Errc::TooShort, "dominant gap needs at least two points");
  // std::map iterates ascending, so the first maximal count is the smallest gap.
  std::map<std::int64_t, std::size_t> histogram;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    ++histogram[to_millis(traj.points[i].t) - to_millis(traj.points[i - 1].t)];
  }
  auto best = histogram.begin();
  for (auto it = histogram.begin(); it != histogram.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return static_cast<double>(best->first) / 1000.0;
}

std::vector<Trajectory> split_on_gap(const Trajectory& traj, double tau) {
  const std::int64_t tau_ms = to_millis(tau);
  std::vector<Trajectory> segments;
  Trajectory current;
  auto flush = [&] {
    if (current.size() >= 2) segments.push_back(std::move(current));
    current = Trajectory{};
  };
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i > 0 && to_millis(traj.points[i].t) - to_millis(traj.points[i - 1].t) != tau_ms) flush();
    if (current.empty()) {
      current.id = fmt::format("{}#{}", traj.id, segments.size());
      current.origin = traj.origin;
      current.gap = tau;
    }
    current.points.push_back(traj.points[i]);
  }
  flush();
  return segments;
}

std::vector<Trajectory> filter_short(std::vector<Trajectory> segments, double min_duration, double min_speed) {
  std::erase_if(segments, [&](const Trajectory& s) {
    if (s.size() < 2) return true;
    const double duration = s.duration();
    return duration < min_duration || axis_distance(s.front(), s.back()) < min_speed * duration;
  });
  return segments;
}

SplitTrajectory train_test_split(const Trajectory& traj, double train_span) {
  if (traj.size() < 2 || to_millis(traj.duration()) < to_millis(2.0 * train_span)) {
    throw Error(Errc::TooShort, fmt::format("trajectory '{}' spans {} s, need {} s", traj.id, traj.duration(),
                                            2.0 * train_span));
  }
  const std::int64_t cut = to_millis(traj.front().t) + to_millis(train_span);
  const auto first_test = std::find_if(traj.points.begin(), traj.points.end(),
                                       [&](const TrackPoint& p) { return to_millis(p.t) > cut; });

  SplitTrajectory split;
  split.id = traj.id;
  split.train.id = traj.id + "/train";
  split.test.id = traj.id + "/test";
  split.train.gap = split.test.gap = traj.gap;
  split.train.points.assign(traj.points.begin(), first_test);
  split.test.points.assign(first_test, traj.points.end());

  const TrackPoint pivot = split.train.back();
  if (traj.origin) {
    const GeoPoint new_origin = unproject(pivot, *traj.origin);
    for (auto* part : {&split.train, &split.test}) {
      for (auto& p : part->points) p = project(unproject(p, *traj.origin), new_origin, p.t);
      part->origin = new_origin;
    }
    split.train.points.back().x = 0.0;
    split.train.points.back().y = 0.0;
  } else {
    for (auto* part : {&split.train, &split.test}) {
      for (auto& p : part->points) {
        p.x -= pivot.x;
        p.y -= pivot.y;
      }
    }
  }
  return split;
}

Trajectory bernoulli_subsample(const Trajectory& traj, const PoissonRate& rate, double tau, std::uint64_t seed) {
  if (!(rate.lambda > 0.0) || !(rate.delta_t > 0.0) || !(tau > 0.0)) {
    throw Error(Errc::InvalidRate, fmt::format("lambda={} delta_t={} tau={}", rate.lambda, rate.delta_t, tau));
  }
  if (rate.lambda * tau > rate.delta_t) {
    throw Error(Errc::RateTooHigh,
                fmt::format("lambda*tau = {} exceeds delta_t = {}", rate.lambda * tau, rate.delta_t));
  }
  const double p = rate.keep_probability(tau);

  Trajectory out;
  out.id = traj.id;
  out.origin = traj.origin;
  if (traj.empty()) return out;

  std::mt19937_64 rng(seed);
  out.points.push_back(traj.front());
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    // 53 high bits -> [0, 1); independent of the standard library's distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < p) out.points.push_back(traj.points[i]);
  }
  if (traj.size() > 1) out.points.push_back(traj.back());
  return out;
}

PoissonRate estimate_lambda(const Trajectory& traj, double delta_t) {
  const double exposure = traj.duration();
  if (!(exposure > 0.0)) throw Error(Errc::TooShort, "cannot estimate a rate over zero duration");
  return {static_cast<double>(traj.size()) * delta_t / exposure, delta_t};
}

std::vector<std::vector<RawFix>> group_by_user(std::span<const RawFix> fixes) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<RawFix>> groups;
  for (const auto& f : fixes) {
    auto [it, inserted] = index.try_emplace(f.user_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(f);
  }
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(), [](const RawFix& a, const RawFix& b) { return a.t < b.t; });
    g.erase(std::unique(g.begin(), g.end(),
                        [](const RawFix& a, const RawFix& b) { return to_millis(a.t) == to_millis(b.t); }),
            g.end());
  }
  return groups;
}

std::vector<RawFix> read_fixes(std::istream& in) {
  std::vector<RawFix> fixes;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return fixes;
  ++line_no;
  if (strip_cr(line) != "user_id,t,lat,lon") throw ParseError(line_no, "expected header 'user_id,t,lat,lon'");
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    const auto fields = split_fields(row);
    if (fields.size() != 4) throw ParseError(line_no, fmt::format("expected 4 fields, got {}", fields.size()));
    RawFix fix;
    fix.user_id = std::string(fields[0]);
    fix.t = parse_number(fields[1], line_no, "t");
    fix.lat = parse_number(fields[2], line_no, "lat");
    fix.lon = parse_number(fields[3], line_no, "lon");
    if (!valid_geo({fix.lat, fix.lon})) {
      throw ParseError(line_no, fmt::format("coordinate out of range: lat={} lon={}", fix.lat, fix.lon));
    }
    fixes.push_back(std::move(fix));
  }
  return fixes;
}

void write_fixes(std::ostream& out, std::span<const RawFix> fixes) {
  out << "user_id,t,lat,lon\n";
  for (const auto& f : fixes) out << fmt::format("{},{:.15g},{:.15g},{:.15g}\n", f.user_id, f.t, f.lat, f.lon);
}

std::vector<RawFix> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  try {
    return read_fixes(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

void write_csv(std::span<const RawFix> fixes, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  write_fixes(out, fixes);
}

Trajectory read_local(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return traj;
  ++line_no;
  if (strip_cr(line) != "t,x,y") throw ParseError(line_no, "expected header 't,x,y'");
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    const auto fields = split_fields(row);
    if (fields.size() != 3) throw ParseError(line_no, fmt::format("expected 3 fields, got {}", fields.size()));
    const TrackPoint p{parse_number(fields[0], line_no, "t"), parse_number(fields[1], line_no, "x"),
                       parse_number(fields[2], line_no, "y")};
    if (!traj.empty() && to_millis(p.t) <= to_millis(traj.back().t)) {
      throw ParseError(line_no, "timestamps must be strictly increasing");
    }
    traj.points.push_back(p);
  }
  return traj;
}

void write_local(std::ostream& out, const Trajectory& traj) {
  out << "t,x,y\n";
  for (const auto& p : traj.points) out << fmt::format("{:.15g},{:.15g},{:.15g}\n", p.t, p.x, p.y);
}

Trajectory load_local_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  try {
    auto traj = read_local(in);
    traj.id = path;
    return traj;
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

void write_local_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  write_local(out, traj);
}

}  // namespace geofence
