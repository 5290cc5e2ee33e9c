#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace glb {

/// Per-place counters. Times are seconds. `processing_cpu_s` is the
/// thread CPU time of the place's processing runs (parallel scheduler) and
/// equals `processing_s` under the single-threaded deterministic scheduler;
/// the two differ when places outnumber cores.
struct WorkerStats {
  std::size_t place = 0;
  double processing_s = 0;
  double processing_cpu_s = 0;
  double distributing_s = 0;
  std::uint64_t random_requests_sent = 0;
  std::uint64_t random_requests_received = 0;
  std::uint64_t lifeline_requests_sent = 0;
  std::uint64_t lifeline_requests_received = 0;
  std::uint64_t random_steals_perpetrated = 0;
  std::uint64_t lifeline_steals_perpetrated = 0;
  std::uint64_t items_seeded = 0;
  std::uint64_t items_spawned = 0;
  std::uint64_t items_sent = 0;
  std::uint64_t items_received = 0;
  std::uint64_t items_processed = 0;
  std::uint64_t items_left = 0;

  /// seeded + received + spawned == processed + sent + left
  bool conserves_items() const noexcept {
    return items_seeded + items_received + items_spawned == items_processed + items_sent + items_left;
  }
};

struct Dispersion {
  double mean = 0;
  double stddev = 0;  // population

  /// stddev / mean, 0 when mean is 0.
  double cv() const noexcept { return mean > 0 ? stddev / mean : 0.0; }
};

inline Dispersion dispersion(const std::vector<double>& xs) {
  Dispersion d;
  if (xs.empty()) return d;
  double sum = 0;
  for (double x : xs) sum += x;
  d.mean = sum / static_cast<double>(xs.size());
  double sq = 0;
  for (double x : xs) sq += (x - d.mean) * (x - d.mean);
  d.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return d;
}

struct StatsReport {
  std::vector<WorkerStats> per_place;
  WorkerStats totals;
  Dispersion workload;      // over processing_s
  Dispersion workload_cpu;  // over processing_cpu_s
  bool items_conserved = false;  // sum sent == sum received
  bool per_place_conserved = false;
  bool steal_counts_consistent = false;
};

inline StatsReport aggregate_stats(std::vector<WorkerStats> all) {
  StatsReport r;
  std::vector<double> wall, cpu;
  bool per_place = true;
  bool steals = true;
  for (const auto& s : all) {
    auto& t = r.totals;
    t.processing_s += s.processing_s;
    t.processing_cpu_s += s.processing_cpu_s;
    t.distributing_s += s.distributing_s;
    t.random_requests_sent += s.random_requests_sent;
    t.random_requests_received += s.random_requests_received;
    t.lifeline_requests_sent += s.lifeline_requests_sent;
    t.lifeline_requests_received += s.lifeline_requests_received;
    t.random_steals_perpetrated += s.random_steals_perpetrated;
    t.lifeline_steals_perpetrated += s.lifeline_steals_perpetrated;
    t.items_seeded += s.items_seeded;
    t.items_spawned += s.items_spawned;
    t.items_sent += s.items_sent;
    t.items_received += s.items_received;
    t.items_processed += s.items_processed;
    t.items_left += s.items_left;
    wall.push_back(s.processing_s);
    cpu.push_back(s.processing_cpu_s);
    per_place = per_place && s.conserves_items();
    steals = steals && s.random_steals_perpetrated <= s.random_requests_sent &&
             s.lifeline_steals_perpetrated <= s.lifeline_requests_sent;
  }
  r.totals.place = all.size();
  r.workload = dispersion(wall);
  r.workload_cpu = dispersion(cpu);
  r.items_conserved = r.totals.items_sent == r.totals.items_received;
  r.per_place_conserved = per_place;
  r.steal_counts_consistent = steals &&
                              r.totals.random_steals_perpetrated <= r.totals.random_requests_received &&
                              r.totals.lifeline_steals_perpetrated <= r.totals.lifeline_requests_received;
  r.per_place = std::move(all);
  return r;
}

}  // namespace glb
