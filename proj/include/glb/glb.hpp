#pragma once

// Entry point: run a TaskQueue workload across P places with lifeline-based
// work stealing and fold the per-place results.

#include <functional>
#include <vector>

#include "glb/clock.hpp"
#include "glb/config.hpp"
#include "glb/runtime.hpp"
#include "glb/stats.hpp"
#include "glb/task_queue.hpp"
#include "glb/worker.hpp"

namespace glb {

template <class Z>
struct RunResult {
  Z value;
  StatsReport stats;
  double elapsed_s = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_delivered = 0;
  bool mailboxes_empty = false;
  std::uint64_t trace_hash = 0;
  std::vector<TraceEvent> trace;
};

/// Builds one queue per place with `make_queue(place)`, lets `root_init`
/// seed place 0, balances until quiescence and folds every place's result
/// with the queue's reducer (identity first, then places 0..P-1).
template <class Factory, class Q = std::invoke_result_t<Factory&, PlaceId>>
  requires TaskQueue<Q>
RunResult<typename Q::result_type> run(const GlbConfig& config, Factory&& make_queue,
                                       const std::function<void(Q&)>& root_init = {}) {
  config.validate();
  PlaceGroup group(config.places, config.mode, config.seed, config.trace);
  std::vector<Worker<Q>> workers;
  workers.reserve(config.places);
  for (PlaceId p = 0; p < config.places; ++p) {
    Q q = make_queue(p);
    if (p == 0 && root_init) root_init(q);
    workers.emplace_back(p, config, group, std::move(q));
  }

  const double t0 = wall_seconds();
  run_until_quiescent(group, workers, config.budget);
  RunResult<typename Q::result_type> out;
  out.value = workers.front().queue().identity();
  out.elapsed_s = wall_seconds() - t0;

  std::vector<WorkerStats> stats;
  stats.reserve(workers.size());
  for (const auto& w : workers) {
    out.value = w.queue().reduce(out.value, w.queue().result());
    stats.push_back(w.stats());
  }
  out.stats = aggregate_stats(std::move(stats));
  out.messages_sent = group.total_sent();
  out.messages_delivered = group.total_delivered();
  out.mailboxes_empty = true;
  for (PlaceId p = 0; p < group.size(); ++p) out.mailboxes_empty = out.mailboxes_empty && group.mailbox_empty(p);
  out.trace_hash = group.trace_hash();
  out.trace = group.trace();
  return out;
}

}  // namespace glb
