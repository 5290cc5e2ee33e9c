#pragma once

// Lifeline graph and random victim selection.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "glb/errors.hpp"

namespace glb {

using PlaceId = std::size_t;

/// Outgoing lifelines of place `i`: hypercube neighbours i ^ 2^k for k < z that
/// exist, plus the ring successor (i+1) mod P when P is not a power of two.
/// For P >= 2 and z = ceil(log2 P) the resulting digraph is strongly connected
/// with out-degree <= z + 1.
inline std::vector<PlaceId> lifeline_buddies(PlaceId i, std::size_t places, std::size_t dim) {
  if (places == 0) throw ConfigError("place count must be positive");
  if (i >= places) throw ConfigError("place index out of range");
  std::vector<PlaceId> out;
  for (std::size_t k = 0; k < dim && k < 64; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    const std::uint64_t cand = static_cast<std::uint64_t>(i) ^ bit;
    if (cand < places) out.push_back(static_cast<PlaceId>(cand));
  }
  const bool pow2 = (places & (places - 1)) == 0;
  if (!pow2) {
    const PlaceId ring = (i + 1) % places;
    if (ring != i && std::find(out.begin(), out.end(), ring) == out.end()) out.push_back(ring);
  }
  return out;
}

/// Uniform draw over {0..P-1} \ {i}; nullopt when there is nobody to rob.
/// Uses the top bits of a 64-bit draw, so the sequence depends only on the
/// engine's output and not on library distribution internals.
template <class Engine>
std::optional<PlaceId> random_victim(PlaceId i, std::size_t places, Engine& rng) {
  if (places < 2) return std::nullopt;
  const std::uint64_t span = places - 1;
  const auto draw = static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * span) >> 64);
  const auto victim = static_cast<PlaceId>(draw);
  return victim >= i ? victim + 1 : victim;
}

}  // namespace glb
