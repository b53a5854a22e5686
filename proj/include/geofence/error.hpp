#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geofence {

enum class Errc {
  EmptyTrajectory,
  DuplicateTimestamp,
  TooShort,
  RateTooHigh,
  InvalidRate,
  ParseError,
  NoTrainingData,
  IllConditioned,
  DegenerateMean,
  InvalidPayoff,
  ConfigError,
  IoError,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& file = {})
      : Error(Errc::ParseError, (file.empty() ? "" : file + ":") + "line " + std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

}  // namespace geofence
