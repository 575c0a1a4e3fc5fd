#pragma once

#include <stdexcept>
#include <string>

namespace ucn {

/// Invalid or inconsistent scenario/experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint file unreadable: bad magic, version, checksum or shape.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scheduling scenario that cannot meet its service floor.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string msg, int hour)
      : std::runtime_error(std::move(msg)), hour(hour) {}
  int hour;
};

/// Brute-force search refused because the instance is too large.
class EnumerationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ucn
