#include "geofence/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "geofence/error.hpp"
#include "geofence/seed.hpp"

namespace geofence {

std::string_view to_string(MotionKind kind) noexcept {
  switch (kind) {
    case MotionKind::ConstantVelocity: return "constant";
    case MotionKind::Turning: return "turning";
    case MotionKind::StopAndGo: return "stop-and-go";
  }
  return "?";
}

std::optional<MotionKind> parse_motion_kind(std::string_view name) noexcept {
  for (auto k : {MotionKind::ConstantVelocity, MotionKind::Turning, MotionKind::StopAndGo}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(Errc::ConfigError, "synth: " + what); };
  if (spec.kinds.empty()) fail("no motion kinds");
  if (spec.count < 0) fail("negative count");
  if (!(spec.duration > 0.0)) fail("duration must be positive");
  if (!(spec.tau > 0.0) || spec.tau > spec.duration) fail("tau must be in (0, duration]");
  if (!(spec.speed_min >= 0.0) || spec.speed_max < spec.speed_min) fail("need 0 <= speed_min <= speed_max");
  if (!(spec.jitter >= 0.0)) fail("jitter must be non-negative");
  if (std::abs(spec.origin.lat) > 89.0 || std::abs(spec.origin.lon) > 180.0) fail("origin out of range");
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Heading rate (rad/s) and speed factor as functions of elapsed time.
struct Maneuver {
  double start = 0.0;
  double end = 0.0;
  double turn_rate = 0.0;
  double speed_factor = 1.0;
};

std::vector<Maneuver> plan(MotionKind kind, double duration, std::mt19937_64& rng) {
  std::vector<Maneuver> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = 0.0;
  while (t < duration) {
    const double cruise = 60.0 + 140.0 * unit(rng);
    t += cruise;
    if (kind == MotionKind::Turning) {
      const double angle = (30.0 + 70.0 * unit(rng)) * kDeg * (unit(rng) < 0.5 ? -1.0 : 1.0);
      const double length = 10.0 + 10.0 * unit(rng);
      out.push_back({t, t + length, angle / length, 1.0});
      t += length;
    } else if (kind == MotionKind::StopAndGo) {
      const double stop = 20.0 + 40.0 * unit(rng);
      out.push_back({t, t + stop, 0.0, 0.0});
      t += stop;
    } else {
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<SynthTrack> synthesize_tracks(const SynthSpec& spec) {
  validate(spec);
  std::vector<SynthTrack> tracks;
  const auto samples = static_cast<std::size_t>(std::floor(spec.duration / spec.tau + 1e-9)) + 1;
  const double dt = 0.1;  // integration step, seconds

  for (int n = 0; n < spec.count; ++n) {
    std::mt19937_64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(n)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    SynthTrack track;
    track.user_id = fmt::format("synth-{:04d}", n);
    track.kind = spec.kinds[static_cast<std::size_t>(n) % spec.kinds.size()];
    const double speed = spec.speed_min + (spec.speed_max - spec.speed_min) * unit(rng);
    double heading = spec.heading_deg ? *spec.heading_deg * kDeg : 2.0 * std::numbers::pi * unit(rng);
    const auto maneuvers = plan(track.kind, spec.duration, rng);

    double x = 0.0, y = 0.0, t = 0.0;
    std::size_t next_maneuver = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double target = static_cast<double>(i) * spec.tau;
      while (t < target - 1e-12) {
        const double h = std::min(dt, target - t);
        double rate = 0.0, factor = 1.0;
        while (next_maneuver < maneuvers.size() && maneuvers[next_maneuver].end <= t) ++next_maneuver;
        if (next_maneuver < maneuvers.size() && maneuvers[next_maneuver].start <= t) {
          rate = maneuvers[next_maneuver].turn_rate;
          factor = maneuvers[next_maneuver].speed_factor;
        }
        const double mid = heading + 0.5 * rate * h;
        x += speed * factor * h * std::sin(mid);
        y += speed * factor * h * std::cos(mid);
        heading += rate * h;
        t += h;
      }
      // straight tracks use the closed form so samples carry no integration drift
      if (track.kind == MotionKind::ConstantVelocity) {
        x = speed * target * std::sin(heading);
        y = speed * target * std::cos(heading);
      }
      const double abs_t = spec.start_time + target;
      track.truth.points.push_back({abs_t, x, y});
      track.observed.points.push_back({abs_t, x + spec.jitter * noise(rng), y + spec.jitter * noise(rng)});
    }
    for (auto* traj : {&track.truth, &track.observed}) {
      traj->id = track.user_id;
      traj->origin = spec.origin;
      traj->gap = spec.tau;
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

std::vector<RawFix> synthesize(const SynthSpec& spec) {
  std::vector<RawFix> fixes;
  for (const auto& track : synthesize_tracks(spec)) {
    for (const auto& p : track.observed.points) {
      const GeoPoint g = unproject(p, spec.origin);
      fixes.push_back({track.user_id, p.t, g.lat, g.lon});
    }
  }
  return fixes;
}

}  // namespace geofence
