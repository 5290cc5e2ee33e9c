#pragma once

#include <bit>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>

#include "glb/errors.hpp"

namespace glb {

enum class SchedulerMode { Deterministic, Parallel };

inline std::string to_string(SchedulerMode m) {
  return m == SchedulerMode::Deterministic ? "deterministic" : "parallel";
}

/// ceil(log2(max(P, 2))): the smallest hypercube dimension covering P places.
constexpr std::size_t default_lifeline_dim(std::size_t places) {
  std::size_t p = places < 2 ? 2 : places;
  return static_cast<std::size_t>(std::bit_width(p - 1));
}

struct GlbConfig {
  std::size_t places = 1;
  std::size_t random_victims = 1;  // w
  std::size_t lifeline_dim = 1;    // z
  std::size_t granularity = 64;    // n, task items per process() call
  std::uint64_t seed = 0;
  SchedulerMode mode = SchedulerMode::Deterministic;
  std::chrono::duration<double> budget{600.0};
  bool trace = false;

  /// w=1, z=ceil(log2 P), n=64.
  static GlbConfig defaults(std::size_t places, SchedulerMode mode = SchedulerMode::Deterministic,
                            std::uint64_t seed = 0) {
    GlbConfig c;
    c.places = places;
    c.random_victims = places > 1 ? 1 : 0;
    c.lifeline_dim = default_lifeline_dim(places);
    c.mode = mode;
    c.seed = seed;
    return c;
  }

  void validate() const {
    if (places == 0) throw ConfigError("place count must be positive");
    if (granularity == 0) throw ConfigError("granularity n must be positive");
    if (random_victims > places - 1)
      throw ConfigError("random victims w=" + std::to_string(random_victims) + " exceeds P-1=" +
                        std::to_string(places - 1));
    if (lifeline_dim > 64) throw ConfigError("lifeline dimension z must be <= 64");
    if (budget.count() <= 0) throw ConfigError("wall-clock budget must be positive");
  }
};

}  // namespace glb
