#pragma once

// Trajectory ingestion and preprocessing: projection to a local metric frame,
// uniform-gap segmentation, filtering, train/test splitting, Poisson-rate
// estimation and Bernoulli thinning.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geofence {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
};

struct RawFix {
  std::string user_id;
  double t = 0.0;  // seconds
  double lat = 0.0;
  double lon = 0.0;
};

struct TrackPoint {
  double t = 0.0;  // seconds
  double x = 0.0;  // meters east of origin
  double y = 0.0;  // meters north of origin
};

struct Trajectory {
  std::string id;
  std::vector<TrackPoint> points;
  std::optional<GeoPoint> origin;  // geographic anchor of (0, 0), when known
  std::optional<double> gap;       // uniform sampling interval for uniform segments

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  const TrackPoint& front() const { return points.front(); }
  const TrackPoint& back() const { return points.back(); }
  double duration() const { return points.empty() ? 0.0 : points.back().t - points.front().t; }
};

struct SplitTrajectory {
  std::string id;
  Trajectory train;  // first train_span seconds, last point at (0, 0)
  Trajectory test;   // remainder
};

// lambda expected measurements per delta_t seconds.
struct PoissonRate {
  double lambda = 0.5;
  double delta_t = 60.0;

  // Bernoulli keep-probability for a uniform trajectory with spacing tau.
  double keep_probability(double tau) const { return lambda * tau / delta_t; }
};

// Timestamps compare at millisecond resolution.
std::int64_t to_millis(double seconds) noexcept;

// Equirectangular projection around origin.
TrackPoint project(GeoPoint p, GeoPoint origin, double t = 0.0) noexcept;
GeoPoint unproject(const TrackPoint& p, GeoPoint origin) noexcept;

Trajectory project_to_local(std::span<const RawFix> fixes, GeoPoint origin);

double dominant_gap(const Trajectory& traj);

std::vector<Trajectory> split_on_gap(const Trajectory& traj, double tau);

std::vector<Trajectory> filter_short(std::vector<Trajectory> segments, double min_duration = 600.0,
                                     double min_speed = 5.0);

SplitTrajectory train_test_split(const Trajectory& traj, double train_span = 300.0);

// Keeps each interior point independently with probability lambda*tau/delta_t;
// endpoints are always kept. Deterministic for a given seed.
Trajectory bernoulli_subsample(const Trajectory& traj, const PoissonRate& rate, double tau,
                               std::uint64_t seed);

PoissonRate estimate_lambda(const Trajectory& traj, double delta_t = 60.0);

// Raw fixes grouped per user in first-appearance order, each group sorted by
// time with exact duplicate timestamps collapsed to the first occurrence.
std::vector<std::vector<RawFix>> group_by_user(std::span<const RawFix> fixes);

// CSV: header `user_id,t,lat,lon`.
std::vector<RawFix> read_fixes(std::istream& in);
void write_fixes(std::ostream& out, std::span<const RawFix> fixes);
std::vector<RawFix> load_csv(const std::string& path);
void write_csv(std::span<const RawFix> fixes, const std::string& path);

// Local-frame CSV: header `t,x,y`.
Trajectory read_local(std::istream& in);
void write_local(std::ostream& out, const Trajectory& traj);
Trajectory load_local_csv(const std::string& path);
void write_local_csv(const Trajectory& traj, const std::string& path);

}  // namespace geofence
