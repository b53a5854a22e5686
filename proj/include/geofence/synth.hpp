#pragma once

// Synthetic driving trajectories standing in for a dense GPS corpus.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "geofence/trajdata.hpp"

namespace geofence {

enum class MotionKind { ConstantVelocity, Turning, StopAndGo };

std::string_view to_string(MotionKind kind) noexcept;
std::optional<MotionKind> parse_motion_kind(std::string_view name) noexcept;

struct SynthSpec {
  std::vector<MotionKind> kinds{MotionKind::ConstantVelocity};  // cycled over tracks
  int count = 1;
  double duration = 1200.0;  // seconds
  double tau = 5.0;          // sampling interval, seconds
  double speed_min = 10.0;   // m/s
  double speed_max = 10.0;
  std::optional<double> heading_deg;  // clockwise from north; random per track when unset
  double jitter = 0.0;                // Gaussian position noise std, meters
  GeoPoint origin{34.0522, -118.2437};
  double start_time = 1559347200.0;  // 2019-06-01T00:00:00Z
  std::uint64_t seed = 1;
};

// Throws ConfigError for an invalid spec.
void validate(const SynthSpec& spec);

// Noise-free and noisy local-frame tracks, one per generated user.
struct SynthTrack {
  std::string user_id;
  MotionKind kind = MotionKind::ConstantVelocity;
  Trajectory truth;
  Trajectory observed;
};

std::vector<SynthTrack> synthesize_tracks(const SynthSpec& spec);

// Observed tracks as raw lat/lon fixes, ready for preprocessing.
std::vector<RawFix> synthesize(const SynthSpec& spec);

}  // namespace geofence
