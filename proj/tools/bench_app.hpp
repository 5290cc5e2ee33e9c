#pragma once

// glb-bench: runs fib / uts / bc under the load balancer and prints a
// RunReport. Exit codes: 0 ok, 1 verification or run failure, 2 usage.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "glb/bc.hpp"
#include "glb/fib.hpp"
#include "glb/glb.hpp"
#include "glb/report.hpp"
#include "glb/uts.hpp"

namespace glb::cli {

enum class LogLevel { Off, Stats, Trace };

inline LogLevel log_level_from_env() {
  const char* v = std::getenv("GLB_LOG");
  if (!v) return LogLevel::Off;
  const std::string s(v);
  if (s == "stats") return LogLevel::Stats;
  if (s == "trace") return LogLevel::Trace;
  return LogLevel::Off;
}

/// Deliberately corrupts the final fold; used to prove --verify can fail.
template <class Q>
struct FaultyReduce : Q {
  explicit FaultyReduce(Q q) : Q(std::move(q)) {}
  typename Q::result_type reduce(const typename Q::result_type& a, const typename Q::result_type& b) const {
    auto r = Q::reduce(a, b);
    if constexpr (std::is_arithmetic_v<typename Q::result_type>)
      r += 1;
    else if (!r.empty())
      r.front() += 1.0;
    return r;
  }
};

/// 64-bit FNV-1a over the map rounded to 9 decimal places.
inline std::uint64_t map_checksum(const bc::BetweennessMap& map) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : map) {
    const auto q = static_cast<std::uint64_t>(std::llround(v * 1e9));
    for (int i = 0; i < 8; ++i) {
      h ^= (q >> (8 * i)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

struct CommonOptions {
  std::size_t places = 1;
  std::optional<std::size_t> w;
  std::optional<std::size_t> z;
  std::optional<std::size_t> n;
  std::string mode = "deterministic";
  std::uint64_t sched_seed = 0;
  bool verify = false;
  std::string out;
  std::string format = "json";
  double timeout_s = 600;
  bool inject_fault = false;

  GlbConfig config(std::size_t default_granularity) const {
    GlbConfig c = GlbConfig::defaults(places, mode == "parallel" ? SchedulerMode::Parallel : SchedulerMode::Deterministic,
                                      sched_seed);
    if (w) c.random_victims = *w;
    if (z) c.lifeline_dim = *z;
    c.granularity = n.value_or(default_granularity);
    c.budget = std::chrono::duration<double>(timeout_s);
    c.trace = log_level_from_env() == LogLevel::Trace;
    c.validate();
    return c;
  }
};

inline void add_common(CLI::App& app, CommonOptions& o) {
  app.add_option("-P,--places", o.places, "number of places")->check(CLI::PositiveNumber);
  app.add_option("-w", o.w, "random victims per steal round (default 1, 0 when P=1)");
  app.add_option("-z", o.z, "lifeline hypercube dimension (default ceil(log2 P))");
  app.add_option("-n", o.n, "task items per process() call");
  app.add_option("--mode", o.mode, "scheduler")->check(CLI::IsMember({"deterministic", "parallel"}));
  app.add_option("--sched-seed", o.sched_seed, "scheduler / victim-selection seed");
  app.add_flag("--verify", o.verify, "compare against the sequential oracle");
  app.add_option("--out", o.out, "write the report to this file instead of stdout");
  app.add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--timeout", o.timeout_s, "wall-clock budget in seconds")->check(CLI::PositiveNumber);
  app.add_flag("--inject-fault", o.inject_fault)->group("");
}

template <class Z>
void fill_common(RunReport& rep, const GlbConfig& c, const RunResult<Z>& run) {
  rep.params["places"] = c.places;
  rep.params["w"] = c.random_victims;
  rep.params["z"] = c.lifeline_dim;
  rep.params["n"] = c.granularity;
  rep.params["mode"] = to_string(c.mode);
  rep.params["sched_seed"] = c.seed;
  rep.elapsed_s = run.elapsed_s;
  rep.per_place = run.stats.per_place;
  rep.workload = run.stats.workload;
  rep.workload_cpu = run.stats.workload_cpu;
}

template <class Q, class Factory>
auto run_queue(const GlbConfig& c, bool faulty, Factory make, std::function<void(Q&)> init) {
  if (!faulty) return run(c, make, init);
  auto wrapped = [&](PlaceId p) { return FaultyReduce<Q>(make(p)); };
  std::function<void(FaultyReduce<Q>&)> winit = [&](FaultyReduce<Q>& q) { init(q); };
  auto r = run(c, wrapped, winit);
  return RunResult<typename Q::result_type>{std::move(r.value), std::move(r.stats), r.elapsed_s,
                                            r.messages_sent, r.messages_delivered, r.mailboxes_empty,
                                            r.trace_hash, std::move(r.trace)};
}

inline void log_run(std::ostream& err, const StatsReport& stats, const std::vector<TraceEvent>& trace) {
  const auto level = log_level_from_env();
  if (level == LogLevel::Off) return;
  for (const auto& s : stats.per_place)
    err << "place " << s.place << " processing " << s.processing_s << "s distributing " << s.distributing_s
        << "s random " << s.random_requests_sent << "/" << s.random_requests_received << " lifeline "
        << s.lifeline_requests_sent << "/" << s.lifeline_requests_received << " steals "
        << s.random_steals_perpetrated << "+" << s.lifeline_steals_perpetrated << " items sent "
        << s.items_sent << " received " << s.items_received << " processed " << s.items_processed << "\n";
  err << "workload mean " << stats.workload.mean << "s stddev " << stats.workload.stddev << "s\n";
  if (level == LogLevel::Trace)
    for (const auto& e : trace)
      err << (e.kind == TraceEvent::Kind::Send ? "send " : "recv ") << e.src << "->" << e.dst << " #" << e.seq
          << " " << tag_name(e.tag) << "\n";
}

/// Returns the process exit code; the report goes to `out` (or --out).
inline int parse_and_run(int argc, const char* const* argv, std::ostream& out = std::cout,
                         std::ostream& err = std::cerr) {
  CLI::App app{"Lifeline-based global load balancing benchmarks", "glb-bench"};
  app.require_subcommand(1);
  CommonOptions common;

  std::uint64_t fib_n = 30;
  auto* fib = app.add_subcommand("fib", "Fibonacci by task expansion");
  add_common(*fib, common);
  fib->add_option("-N", fib_n, "Fibonacci index")->check(CLI::Range(0, 92));

  uts::Params up;
  auto* utsc = app.add_subcommand("uts", "Unbalanced Tree Search, geometric law");
  add_common(*utsc, common);
  utsc->add_option("--b0", up.b0, "expected branching factor");
  utsc->add_option("--seed", up.seed, "root seed");
  utsc->add_option("--depth", up.depth, "depth cutoff");

  bc::RmatParams rp;
  std::string rmat_spec;
  std::string baseline = "glb";
  std::string graph_file;
  std::string strategy = "suffix";
  std::optional<std::size_t> degenerate;
  auto* bcc = app.add_subcommand("bc", "Betweenness centrality");
  add_common(*bcc, common);
  bcc->add_option("--scale", rp.scale, "R-MAT scale (log2 vertices)");
  bcc->add_option("--graph-seed", rp.seed, "R-MAT seed");
  bcc->add_option("--edge-factor", rp.edge_factor, "R-MAT edges per vertex");
  bcc->add_option("--rmat", rmat_spec, "quadrant probabilities a,b,c,d");
  bcc->add_option("--baseline", baseline, "partitioning")->check(CLI::IsMember({"static", "static-random", "glb"}));
  bcc->add_option("--degenerate", degenerate, "use the i<j degenerate graph with this many vertices");
  bcc->add_option("--graph", graph_file, "read the graph from a \"N M / u v\" text file");
  bcc->add_option("--strategy", strategy, "interval split strategy")->check(CLI::IsMember({"suffix", "each"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  RunReport rep;
  bool ok = true;
  try {
    if (fib->parsed()) {
      const auto c = common.config(64);
      rep.benchmark = "fib";
      std::function<void(FibQueue&)> init = [&](FibQueue& q) { q.init(fib_n); };
      auto r = run_queue<FibQueue>(c, common.inject_fault, [](PlaceId) { return FibQueue(); }, init);
      fill_common(rep, c, r);
      rep.params["N"] = fib_n;
      rep.result["value"] = r.value;
      if (common.verify) {
        const auto expect = fib_sequential(fib_n);
        ok = r.value == expect;
        rep.result["verified"] = ok;
        rep.result["expected"] = expect;
      }
      log_run(err, r.stats, r.trace);
    } else if (utsc->parsed()) {
      up.validate();
      const auto c = common.config(64);
      rep.benchmark = "uts";
      std::function<void(uts::Queue&)> init = [](uts::Queue& q) { q.init(); };
      auto r = run_queue<uts::Queue>(c, common.inject_fault, [&](PlaceId) { return uts::Queue(up); }, init);
      fill_common(rep, c, r);
      rep.params["b0"] = up.b0;
      rep.params["seed"] = up.seed;
      rep.params["depth"] = up.depth;
      rep.result["count"] = r.value;
      if (r.elapsed_s > 0) rep.nodes_per_second = static_cast<double>(r.value) / r.elapsed_s;
      if (common.verify) {
        const auto expect = uts::count_sequential(up);
        ok = r.value == expect;
        rep.result["verified"] = ok;
        rep.result["expected"] = expect;
      }
      log_run(err, r.stats, r.trace);
    } else {
      if (!rmat_spec.empty()) {
        std::vector<double> q;
        std::stringstream ss(rmat_spec);
        std::string item;
        while (std::getline(ss, item, ',')) q.push_back(std::stod(item));
        if (q.size() != 4) throw ConfigError("--rmat expects four comma-separated probabilities");
        rp.a = q[0];
        rp.b = q[1];
        rp.c = q[2];
        rp.d = q[3];
      }
      std::shared_ptr<const bc::Graph> graph;
      if (!graph_file.empty()) {
        std::ifstream in(graph_file);
        if (!in) throw ConfigError("cannot open graph file " + graph_file);
        graph = std::make_shared<const bc::Graph>(bc::read_graph(in));
        rep.params["graph"] = graph_file;
      } else if (degenerate) {
        graph = std::make_shared<const bc::Graph>(bc::degenerate_graph(*degenerate));
        rep.params["degenerate"] = *degenerate;
      } else {
        graph = std::make_shared<const bc::Graph>(bc::rmat_generate(rp));
        rep.params["scale"] = rp.scale;
        rep.params["graph_seed"] = rp.seed;
        rep.params["edge_factor"] = rp.edge_factor;
        rep.params["rmat"] = {rp.a, rp.b, rp.c, rp.d};
      }
      rep.benchmark = "bc";
      rep.params["baseline"] = baseline;
      const auto c = common.config(1);
      bc::BetweennessMap map;
      if (baseline == "glb") {
        const auto split = strategy == "each" ? SplitStrategy::EachHalved : SplitStrategy::SuffixBalanced;
        rep.params["strategy"] = strategy;
        std::function<void(bc::Queue&)> init = [](bc::Queue& q) { q.init(); };
        auto r = run_queue<bc::Queue>(c, common.inject_fault, [&](PlaceId) { return bc::Queue(graph, split); }, init);
        fill_common(rep, c, r);
        map = std::move(r.value);
        log_run(err, r.stats, r.trace);
      } else {
        auto s = bc::bc_static(*graph, c.places, baseline == "static-random", c.seed, c.mode);
        rep.params["places"] = c.places;
        rep.params["mode"] = to_string(c.mode);
        rep.params["sched_seed"] = c.seed;
        rep.elapsed_s = s.elapsed_s;
        for (std::size_t p = 0; p < c.places; ++p) {
          WorkerStats ws;
          ws.place = p;
          ws.processing_s = s.busy_s[p];
          ws.processing_cpu_s = s.busy_cpu_s[p];
          rep.per_place.push_back(ws);
        }
        rep.workload = dispersion(s.busy_s);
        rep.workload_cpu = dispersion(s.busy_cpu_s);
        map = std::move(s.map);
        if (common.inject_fault && !map.empty()) map.front() += 1.0;
      }
      const auto top = bc::top_vertices(map);
      rep.result["vertices"] = graph->vertex_count();
      rep.result["edges"] = graph->edge_count();
      rep.result["top_vertices"] = top;
      rep.result["top_score"] = map.empty() ? 0.0 : map[top.front()];
      std::ostringstream hex;
      hex << std::hex << map_checksum(map);
      rep.result["checksum"] = hex.str();
      rep.teps = bc::teps(graph->vertex_count(), std::max(rep.elapsed_s, 1e-9));
      if (common.verify) {
        const auto expect = bc::bc_sequential(*graph);
        double worst = 0;
        for (std::size_t i = 0; i < expect.size(); ++i) worst = std::max(worst, std::abs(expect[i] - map[i]));
        ok = worst <= 1e-9;
        rep.result["verified"] = ok;
        rep.result["max_abs_error"] = worst;
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const auto format = common.format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  const auto text = emit_report(rep, format);
  if (common.out.empty()) {
    out << text;
  } else {
    std::ofstream f(common.out);
    if (!f) {
      err << "error: cannot write " << common.out << "\n";
      return 1;
    }
    f << text;
  }
  if (!ok) err << "verification FAILED\n";
  return ok ? 0 : 1;
}

}  // namespace glb::cli
