#pragma once

// Brute-force betweenness for small graphs. Shares nothing with the
// Brandes kernel: distances come from Floyd-Warshall over an adjacency
// matrix and sigma_st(v) = sigma_sv * sigma_vt whenever v lies on a
// shortest s-t path.

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "glb/bc.hpp"

namespace glb::bc {

inline constexpr std::size_t kBruteForceMaxVertices = 128;

inline BetweennessMap bc_bruteforce(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n > kBruteForceMaxVertices)
    throw ConfigError("brute-force oracle refuses graphs above " + std::to_string(kBruteForceMaxVertices) +
                      " vertices");
  constexpr long kInf = std::numeric_limits<long>::max() / 4;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (auto [u, v] : g.edges()) adj[u][v] = 1;

  std::vector<std::vector<long>> dist(n, std::vector<long>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    dist[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) dist[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];

  // sigma[s][t]: number of shortest s->t paths, built by increasing distance.
  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> by_dist;
    for (std::size_t t = 0; t < n; ++t)
      if (dist[s][t] < kInf) by_dist.push_back(t);
    std::sort(by_dist.begin(), by_dist.end(), [&](auto x, auto y) { return dist[s][x] < dist[s][y]; });
    for (auto t : by_dist) {
      if (t == s) {
        sigma[s][t] = 1.0;
        continue;
      }
      double paths = 0.0;
      for (std::size_t u = 0; u < n; ++u)
        if (adj[u][t] && dist[s][u] < kInf && dist[s][u] + 1 == dist[s][t]) paths += sigma[s][u];
      sigma[s][t] = paths;
    }
  }

  BetweennessMap bc(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || dist[s][t] >= kInf) continue;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == s || v == t) continue;
        if (dist[s][v] < kInf && dist[v][t] < kInf && dist[s][v] + dist[v][t] == dist[s][t])
          bc[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
      }
    }
  return bc;
}

}  // namespace glb::bc
