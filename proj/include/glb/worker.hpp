#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "glb/clock.hpp"
#include "glb/config.hpp"
#include "glb/errors.hpp"
#include "glb/message.hpp"
#include "glb/runtime.hpp"
#include "glb/stats.hpp"
#include "glb/task_queue.hpp"
#include "glb/topology.hpp"

namespace glb {

enum class WorkerMode { Active, Stealing, Inactive };

inline std::string to_string(WorkerMode m) {
  switch (m) {
    case WorkerMode::Active: return "active";
    case WorkerMode::Stealing: return "stealing";
    case WorkerMode::Inactive: return "inactive";
  }
  return "?";
}

/// Per-place load-balancing engine.
///
/// step() drains the mailbox, runs one process(n) call while Active, feeds
/// recorded lifeline thieves, and starts stealing once the bag runs dry.
/// Stealing is a non-blocking state machine: at most one random request is
/// outstanding at a time, up to w of them in sequence, then one lifeline
/// request per buddy that does not already hold one, after which the worker
/// goes Inactive until a Deal or LifelinePush revives it. Only Active
/// workers deal; others answer random requests with NoWork and record
/// lifeline requests.
template <TaskQueue Q>
class Worker {
 public:
  using queue_type = Q;

  Worker(PlaceId id, const GlbConfig& config, PlaceGroup& group, Q queue)
      : id_(id),
        places_(config.places),
        random_victims_(config.random_victims),
        granularity_(config.granularity),
        cpu_stretches_(config.mode == SchedulerMode::Parallel),
        group_(&group),
        queue_(std::move(queue)),
        buddies_(lifeline_buddies(id, config.places, config.lifeline_dim)),
        incoming_(config.places, 0),
        lifeline_pending_(config.places, 0) {
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(id), std::uint64_t{0x9e3779b97f4a7c15ULL}};
    rng_.seed(seq);
    for (PlaceId j = 0; j < places_; ++j) {
      if (j == id_) continue;
      const auto b = lifeline_buddies(j, places_, config.lifeline_dim);
      if (std::find(b.begin(), b.end(), id_) != b.end()) incoming_[j] = 1;
    }
    stats_.place = id_;
    stats_.items_seeded = queue_.size();
  }

  PlaceId id() const noexcept { return id_; }
  WorkerMode mode() const noexcept { return mode_; }
  std::string mode_name() const { return to_string(mode_); }
  bool runnable() const noexcept { return mode_ == WorkerMode::Active; }
  bool idle() const { return mode_ == WorkerMode::Inactive && queue_.size() == 0; }

  Q& queue() noexcept { return queue_; }
  const Q& queue() const noexcept { return queue_; }
  const std::vector<PlaceId>& buddies() const noexcept { return buddies_; }
  const std::vector<PlaceId>& lifeline_thieves() const noexcept { return thieves_; }
  bool awaiting_random_reply() const noexcept { return awaiting_; }

  WorkerStats stats() const {
    WorkerStats s = stats_;
    s.items_left = queue_.size();
    return s;
  }

  void step() {
    drain_mailbox();
    if (mode_ != WorkerMode::Active) return;
    const bool more = timed_process();
    if (!thieves_.empty()) distribute_to_lifelines();
    if (!more && queue_.size() == 0) begin_steal();
  }

  void drain_mailbox() {
    while (auto env = group_->try_receive(id_)) handle(*env);
  }

  void handle(const Envelope& env) {
    close_cpu_stretch();
    std::visit([&](auto&& msg) { on(env.src, std::move(msg)); }, env.message());
  }

  /// Hand a split half to each recorded thief, in recording order, until
  /// the bag stops splitting. Unserved thieves stay recorded.
  void distribute_to_lifelines() {
    auto it = thieves_.begin();
    while (it != thieves_.end()) {
      auto bag = split_for_transfer();
      if (!bag) break;
      group_->send(id_, *it, LifelinePush{std::move(*bag)});
      it = thieves_.erase(it);
    }
  }

  /// Enter the stealing rounds (bag assumed drained).
  void begin_steal() {
    close_cpu_stretch();
    mode_ = WorkerMode::Stealing;
    attempts_left_ = places_ >= 2 ? random_victims_ : 0;
    advance_steal();
  }

 private:
  bool timed_process() {
    const auto size_before = queue_.size();
    const auto done_before = queue_.items_processed();
    if (cpu_stretches_ && !cpu_open_) {
      cpu_open_ = true;
      cpu0_ = thread_cpu_seconds();
    }
    const double w0 = wall_seconds();
    bool more = false;
    try {
      more = queue_.process(granularity_);
    } catch (const std::exception& e) {
      throw WorkerError(id_, e.what());
    }
    const double dt = wall_seconds() - w0;
    stats_.processing_s += dt;
    if (!cpu_stretches_) stats_.processing_cpu_s += dt;
    const auto done = queue_.items_processed() - done_before;
    stats_.items_processed += done;
    stats_.items_spawned += queue_.size() + done - size_before;
    return more;
  }

  // Reading the thread CPU clock is a syscall here, so in parallel mode it is
  // sampled once per uninterrupted run of process() calls rather than per call.
  void close_cpu_stretch() {
    if (!cpu_open_) return;
    cpu_open_ = false;
    stats_.processing_cpu_s += thread_cpu_seconds() - cpu0_;
  }

  std::optional<Bytes> split_for_transfer() {
    close_cpu_stretch();
    const double t0 = wall_seconds();
    auto bag = queue_.split();
    if (!bag || bag->size() == 0) {
      if (bag) queue_.merge(std::move(*bag));
      stats_.distributing_s += wall_seconds() - t0;
      return std::nullopt;
    }
    Bytes out;
    ByteWriter w(out);
    bag->encode(w);
    stats_.items_sent += bag->size();
    stats_.distributing_s += wall_seconds() - t0;
    return out;
  }

  void receive_bag(PlaceId src, const Bytes& raw) {
    ByteReader r(raw);
    auto bag = queue_.decode_bag(r);
    if (bag.size() == 0)
      throw ProtocolError("place " + std::to_string(id_) + " received an empty bag from " + std::to_string(src));
    stats_.items_received += bag.size();
    queue_.merge(std::move(bag));
    mode_ = WorkerMode::Active;
  }

  void on(PlaceId src, StealRequest req) {
    if (req.thief != src) throw ProtocolError("steal request thief does not match sender");
    const bool lifeline = req.kind == StealKind::Lifeline;
    if (lifeline) {
      if (!incoming_[src])
        throw ProtocolError("lifeline request from " + std::to_string(src) + ", which is not a lifeline of " +
                            std::to_string(id_));
      ++stats_.lifeline_requests_received;
    } else {
      ++stats_.random_requests_received;
    }
    if (mode_ == WorkerMode::Active) {
      if (auto bag = split_for_transfer()) {
        group_->send(id_, src, Deal{req.kind, std::move(*bag)});
        return;
      }
    }
    if (lifeline) {
      if (std::find(thieves_.begin(), thieves_.end(), src) == thieves_.end()) thieves_.push_back(src);
    } else {
      group_->send(id_, src, NoWork{StealKind::Random});
    }
  }

  void on(PlaceId src, Deal deal) {
    receive_bag(src, deal.bag);
    if (deal.kind == StealKind::Random) {
      ++stats_.random_steals_perpetrated;
      if (awaiting_ && src == victim_) awaiting_ = false;
    } else {
      ++stats_.lifeline_steals_perpetrated;
      lifeline_pending_[src] = 0;
    }
  }

  void on(PlaceId src, NoWork nw) {
    if (nw.kind == StealKind::Random) {
      if (awaiting_ && src == victim_) awaiting_ = false;
      advance_steal();
    } else {
      lifeline_pending_[src] = 0;
    }
  }

  void on(PlaceId src, LifelinePush push) {
    receive_bag(src, push.bag);
    ++stats_.lifeline_steals_perpetrated;
    lifeline_pending_[src] = 0;
  }

  void advance_steal() {
    if (mode_ != WorkerMode::Stealing || awaiting_) return;
    if (attempts_left_ > 0) {
      if (auto victim = random_victim(id_, places_, rng_)) {
        --attempts_left_;
        awaiting_ = true;
        victim_ = *victim;
        ++stats_.random_requests_sent;
        group_->send(id_, *victim, StealRequest{id_, StealKind::Random});
        return;
      }
    }
    for (PlaceId b : buddies_) {
      if (lifeline_pending_[b]) continue;
      lifeline_pending_[b] = 1;
      ++stats_.lifeline_requests_sent;
      group_->send(id_, b, StealRequest{id_, StealKind::Lifeline});
    }
    mode_ = WorkerMode::Inactive;
  }

  PlaceId id_;
  std::size_t places_;
  std::size_t random_victims_;
  std::size_t granularity_;
  bool cpu_stretches_;
  bool cpu_open_ = false;
  double cpu0_ = 0;
  PlaceGroup* group_;
  Q queue_;
  WorkerMode mode_ = WorkerMode::Active;
  std::vector<PlaceId> buddies_;
  std::vector<char> incoming_;          // j -> this place is one of j's lifelines
  std::vector<char> lifeline_pending_;  // our lifeline request to b is outstanding
  std::vector<PlaceId> thieves_;        // recorded lifeline thieves, in arrival order
  std::size_t attempts_left_ = 0;
  bool awaiting_ = false;
  PlaceId victim_ = 0;
  std::mt19937_64 rng_;
  WorkerStats stats_;
};

}  // namespace glb
