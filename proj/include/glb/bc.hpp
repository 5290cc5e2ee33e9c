#pragma once

// Betweenness centrality: graph construction (R-MAT, degenerate, text
// files), the Brandes single-source kernel, a static-partition baseline and
// the work-stealing variant over interval bags.
//
// Graphs are directed and BFS follows out-edges. Scores sum over ordered
// (s, t) pairs without halving.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "glb/bags/interval_bag.hpp"
#include "glb/clock.hpp"
#include "glb/config.hpp"
#include "glb/errors.hpp"
#include "glb/glb.hpp"
#include "glb/stats.hpp"

namespace glb::bc {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;
using BetweennessMap = std::vector<double>;

/// Compressed out-adjacency of a simple digraph.
class Graph {
 public:
  Graph() = default;

  /// Throws ConfigError on out-of-range endpoints, self-loops or duplicates.
  static Graph from_edges(std::size_t vertices, std::vector<Edge> edges) {
    if (vertices > std::numeric_limits<Vertex>::max()) throw ConfigError("too many vertices");
    std::sort(edges.begin(), edges.end());
    Graph g;
    g.offsets_.assign(vertices + 1, 0);
    g.targets_.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto [u, v] = edges[i];
      if (u >= vertices || v >= vertices)
        throw ConfigError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
      if (u == v) throw ConfigError("self-loop at " + std::to_string(u));
      if (i > 0 && edges[i - 1] == edges[i])
        throw ConfigError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      ++g.offsets_[u + 1];
      g.targets_.push_back(v);
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    return g;
  }

  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size(); }
  std::span<const Vertex> out(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t out_degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(targets_.size());
    for (Vertex u = 0; u < vertex_count(); ++u)
      for (Vertex v : this->out(u)) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
};

/// Adds both (u, v) and (v, u) for every listed pair.
inline Graph symmetric_graph(std::size_t vertices, const std::vector<Edge>& pairs) {
  std::vector<Edge> e;
  for (auto [u, v] : pairs) {
    e.emplace_back(u, v);
    e.emplace_back(v, u);
  }
  return Graph::from_edges(vertices, std::move(e));
}

// Text format: "N M" then M lines "u v".
inline Graph read_graph(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) throw ConfigError("graph file: expected header \"N M\"");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t u = 0, v = 0;
    if (!(in >> u >> v)) throw ConfigError("graph file: expected " + std::to_string(m) + " edges, got " +
                                           std::to_string(i));
    if (u >= n || v >= n) throw ConfigError("graph file: edge endpoint out of range");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return Graph::from_edges(n, std::move(edges));
}

inline void write_graph(std::ostream& out, const Graph& g) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

struct RmatParams {
  std::uint32_t scale = 5;
  double a = 0.8, b = 0.05, c = 0.05, d = 0.1;
  std::uint64_t seed = 1;
  std::uint32_t edge_factor = 8;

  void validate() const {
    if (scale < 1 || scale > 30) throw ConfigError("R-MAT scale must be in [1, 30]");
    if (a < 0 || b < 0 || c < 0 || d < 0) throw ConfigError("R-MAT probabilities must be non-negative");
    if (std::abs(a + b + c + d - 1.0) > 1e-12) throw ConfigError("R-MAT probabilities must sum to 1");
  }
};

/// edge_factor * 2^scale candidate edges, each placed by `scale` rounds of
/// quadrant selection; self-loops and duplicates are dropped.
inline Graph rmat_generate(const RmatParams& p) {
  p.validate();
  const std::size_t n = std::size_t{1} << p.scale;
  const std::size_t candidates = std::size_t{p.edge_factor} * n;
  std::mt19937_64 rng(p.seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Edge> edges;
  edges.reserve(candidates);
  for (std::size_t e = 0; e < candidates; ++e) {
    Vertex u = 0, v = 0;
    for (std::uint32_t level = 0; level < p.scale; ++level) {
      const double r = unit();
      const Vertex bit = Vertex{1} << (p.scale - 1 - level);
      if (r < p.a) {
      } else if (r < p.a + p.b) {
        v |= bit;
      } else if (r < p.a + p.b + p.c) {
        u |= bit;
      } else {
        u |= bit;
        v |= bit;
      }
    }
    if (u != v) edges.emplace_back(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph::from_edges(n, std::move(edges));
}

/// Edge (i, j) for every i < j.
inline Graph degenerate_graph(std::size_t vertices) {
  if (vertices == 0) throw ConfigError("degenerate graph needs at least one vertex");
  std::vector<Edge> edges;
  edges.reserve(vertices * (vertices - 1) / 2);
  for (Vertex i = 0; i < vertices; ++i)
    for (Vertex j = i + 1; j < vertices; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(vertices, std::move(edges));
}

/// Scratch space for brandes_source, reusable across sources of one graph.
struct BrandesWorkspace {
  explicit BrandesWorkspace(std::size_t n = 0) { resize(n); }
  void resize(std::size_t n) {
    dist.assign(n, -1);
    sigma.assign(n, 0.0);
    delta.assign(n, 0.0);
    order.clear();
    order.reserve(n);
  }
  std::vector<std::int64_t> dist;
  std::vector<double> sigma;  // shortest-path counts from the source
  std::vector<double> delta;  // dependency of the source on each vertex
  std::vector<Vertex> order;  // BFS visitation order
};

/// Adds the dependencies of source `s` to `acc` (Brandes, unweighted).
inline void brandes_source(const Graph& g, Vertex s, std::span<double> acc, BrandesWorkspace& ws) {
  const std::size_t n = g.vertex_count();
  if (s >= n) throw std::out_of_range("source " + std::to_string(s) + " >= vertex count " + std::to_string(n));
  if (acc.size() != n) throw ConfigError("betweenness map length does not match the graph");
  if (ws.dist.size() != n) ws.resize(n);

  ws.order.clear();
  ws.dist[s] = 0;
  ws.sigma[s] = 1.0;
  ws.order.push_back(s);
  for (std::size_t head = 0; head < ws.order.size(); ++head) {
    const Vertex v = ws.order[head];
    const auto dv = ws.dist[v];
    for (Vertex w : g.out(v)) {
      if (ws.dist[w] < 0) {
        ws.dist[w] = dv + 1;
        ws.order.push_back(w);
      }
      if (ws.dist[w] == dv + 1) ws.sigma[w] += ws.sigma[v];
    }
  }
  for (auto it = ws.order.rbegin(); it != ws.order.rend(); ++it) {
    const Vertex v = *it;
    double dep = 0.0;
    for (Vertex w : g.out(v))
      if (ws.dist[w] == ws.dist[v] + 1) dep += ws.sigma[v] / ws.sigma[w] * (1.0 + ws.delta[w]);
    ws.delta[v] = dep;
    if (v != s) acc[v] += dep;
  }
  for (Vertex v : ws.order) {
    ws.dist[v] = -1;
    ws.sigma[v] = 0.0;
    ws.delta[v] = 0.0;
  }
}

inline void brandes_source(const Graph& g, Vertex s, std::span<double> acc) {
  BrandesWorkspace ws(g.vertex_count());
  brandes_source(g, s, acc, ws);
}

inline BetweennessMap bc_sequential(const Graph& g) {
  BetweennessMap map(g.vertex_count(), 0.0);
  BrandesWorkspace ws(g.vertex_count());
  for (Vertex s = 0; s < g.vertex_count(); ++s) brandes_source(g, s, map, ws);
  return map;
}

inline BetweennessMap reduce_maps(const BetweennessMap& a, const BetweennessMap& b) {
  if (a.size() != b.size())
    throw ConfigError("betweenness maps differ in length: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  BetweennessMap out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

/// Every index holding the maximum score.
inline std::vector<Vertex> top_vertices(const BetweennessMap& map) {
  std::vector<Vertex> out;
  if (map.empty()) return out;
  const double best = *std::max_element(map.begin(), map.end());
  for (Vertex v = 0; v < map.size(); ++v)
    if (map[v] == best) out.push_back(v);
  return out;
}

/// Traversed edges per second, 8 N^2 / t.
inline double teps(std::uint64_t vertices, double seconds) {
  if (!(seconds > 0)) throw std::domain_error("TEPS needs a positive elapsed time");
  const double n = static_cast<double>(vertices);
  return 8.0 * n * n / seconds;
}

struct StaticResult {
  BetweennessMap map;
  std::vector<double> busy_s;      // per place, wall clock
  std::vector<double> busy_cpu_s;  // per place, thread CPU time
  double elapsed_s = 0;
};

/// Static partition: sources (optionally permuted with `seed`) are cut into
/// P contiguous blocks, one per place; local maps are summed at the end.
inline StaticResult bc_static(const Graph& g, std::size_t places, bool randomize, std::uint64_t seed,
                              SchedulerMode mode = SchedulerMode::Parallel) {
  if (places == 0) throw ConfigError("place count must be positive");
  const std::size_t n = g.vertex_count();
  std::vector<Vertex> sources(n);
  std::iota(sources.begin(), sources.end(), Vertex{0});
  if (randomize) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * i) >> 64);
      std::swap(sources[i - 1], sources[j]);
    }
  }

  StaticResult out;
  std::vector<BetweennessMap> local(places, BetweennessMap(n, 0.0));
  out.busy_s.assign(places, 0.0);
  out.busy_cpu_s.assign(places, 0.0);
  auto work = [&](std::size_t p) {
    const double w0 = wall_seconds();
    const double c0 = thread_cpu_seconds();
    BrandesWorkspace ws(n);
    for (std::size_t i = p * n / places; i < (p + 1) * n / places; ++i) brandes_source(g, sources[i], local[p], ws);
    out.busy_cpu_s[p] = thread_cpu_seconds() - c0;
    out.busy_s[p] = wall_seconds() - w0;
  };

  const double t0 = wall_seconds();
  if (mode == SchedulerMode::Parallel && places > 1) {
    std::vector<std::jthread> threads;
    for (std::size_t p = 0; p < places; ++p) threads.emplace_back(work, p);
  } else {
    for (std::size_t p = 0; p < places; ++p) work(p);
  }
  out.map.assign(n, 0.0);
  for (const auto& m : local) out.map = reduce_maps(out.map, m);
  out.elapsed_s = wall_seconds() - t0;
  return out;
}

/// Source intervals of one place; process(n) runs the next n sources.
class Queue {
 public:
  using bag_type = IntervalBag;
  using result_type = BetweennessMap;

  Queue(std::shared_ptr<const Graph> graph, SplitStrategy strategy = SplitStrategy::SuffixBalanced)
      : graph_(std::move(graph)),
        bag_(strategy),
        map_(graph_->vertex_count(), 0.0),
        ws_(graph_->vertex_count()) {}

  /// Seed the whole vertex range.
  void init() { bag_.push_back({0, graph_->vertex_count()}); }

  bool process(std::size_t n) {
    const auto sources = bag_.pop(n);
    for (auto s : sources) brandes_source(*graph_, static_cast<Vertex>(s), map_, ws_);
    processed_ += sources.size();
    return sources.size() == n;
  }

  std::optional<IntervalBag> split() { return bag_.split(); }
  void merge(IntervalBag&& incoming) { bag_.merge(std::move(incoming)); }
  IntervalBag decode_bag(ByteReader& r) const {
    auto bag = IntervalBag::decode(r, bag_.strategy());
    for (const auto& iv : bag.intervals())
      if (iv.high > graph_->vertex_count()) throw ProtocolError("source interval beyond the vertex range");
    return bag;
  }

  std::uint64_t size() const noexcept { return bag_.size(); }
  std::uint64_t items_processed() const noexcept { return processed_; }
  const IntervalBag& bag() const noexcept { return bag_; }

  result_type result() const { return map_; }
  result_type identity() const { return BetweennessMap(graph_->vertex_count(), 0.0); }
  result_type reduce(const result_type& a, const result_type& b) const { return reduce_maps(a, b); }

 private:
  std::shared_ptr<const Graph> graph_;
  IntervalBag bag_;
  BetweennessMap map_;
  BrandesWorkspace ws_;
  std::uint64_t processed_ = 0;
};

/// Work-stealing BC: place 0 starts with [0, N), every place shares the graph.
inline RunResult<BetweennessMap> bc_glb(std::shared_ptr<const Graph> graph, const GlbConfig& config,
                                        SplitStrategy strategy = SplitStrategy::SuffixBalanced) {
  return run(
      config, [&](PlaceId) { return Queue(graph, strategy); }, std::function<void(Queue&)>([](Queue& q) { q.init(); }));
}

}  // namespace glb::bc
