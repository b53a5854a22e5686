#include "geofence/error.hpp"

namespace geofence {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyTrajectory: return "EmptyTrajectory";
    case Errc::DuplicateTimestamp: return "DuplicateTimestamp";
    case Errc::TooShort: return "TooShort";
    case Errc::RateTooHigh: return "RateTooHigh";
    case Errc::InvalidRate: return "InvalidRate";
    case Errc::ParseError: return "ParseError";
    case Errc::NoTrainingData: return "NoTrainingData";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::DegenerateMean: return "DegenerateMean";
    case Errc::InvalidPayoff: return "InvalidPayoff";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace geofence
