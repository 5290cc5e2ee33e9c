#pragma once

#include <stdexcept>
#include <string>

namespace glb {

/// Rejected configuration: place counts, victim counts, probability sums, strategy mismatches.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A message that the steal protocol forbids, or a malformed/misrouted envelope.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quiescence was not reached within the wall-clock budget.
class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A user TaskQueue raised while being driven by a worker.
class WorkerError : public std::runtime_error {
 public:
  WorkerError(std::size_t place, const std::string& what)
      : std::runtime_error("place " + std::to_string(place) + ": " + what), place_(place) {}
  std::size_t place() const noexcept { return place_; }

 private:
  std::size_t place_;
};

}  // namespace glb
