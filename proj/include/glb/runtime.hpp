#pragma once

// Places substrate: per-place FIFO mailboxes, per-pair send/delivery
// counters, global quiescence observation and the two schedulers.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "glb/config.hpp"
#include "glb/errors.hpp"
#include "glb/message.hpp"
#include "glb/topology.hpp"

namespace glb {

struct Envelope {
  PlaceId src = 0;
  PlaceId dst = 0;
  std::uint64_t seq = 0;  // per (src, dst), starting at 0
  Bytes payload;          // encode_message() output

  Message message() const { return decode_message(payload); }
};

struct TraceEvent {
  enum class Kind : std::uint8_t { Send, Deliver } kind;
  PlaceId src;
  PlaceId dst;
  std::uint64_t seq;
  MessageTag tag;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class PlaceGroup {
 public:
  PlaceGroup(std::size_t places, SchedulerMode mode, std::uint64_t seed, bool keep_trace = false)
      : mode_(mode), seed_(seed), keep_trace_(keep_trace && mode == SchedulerMode::Deterministic) {
    if (places == 0) throw ConfigError("place count must be positive");
    boxes_.reserve(places);
    for (std::size_t i = 0; i < places; ++i) boxes_.push_back(std::make_unique<Mailbox>(places));
    idle_ = std::make_unique<std::atomic<bool>[]>(places);
    for (std::size_t i = 0; i < places; ++i) idle_[i].store(true);
  }

  PlaceGroup(const PlaceGroup&) = delete;
  PlaceGroup& operator=(const PlaceGroup&) = delete;

  std::size_t size() const noexcept { return boxes_.size(); }
  SchedulerMode mode() const noexcept { return mode_; }
  std::uint64_t seed() const noexcept { return seed_; }

  void send(PlaceId src, PlaceId dst, const Message& msg) {
    if (src >= size()) throw ProtocolError("send from unknown place " + std::to_string(src));
    if (dst >= size()) throw ProtocolError("no route to place " + std::to_string(dst));
    Envelope env{src, dst, 0, encode_message(msg)};
    auto& box = *boxes_[dst];
    {
      std::lock_guard lk(box.m);
      env.seq = box.sent_from[src]++;
      record({TraceEvent::Kind::Send, src, dst, env.seq, tag_of(msg)});
      box.q.push_back(std::move(env));
      box.count.fetch_add(1, std::memory_order_release);
    }
    in_flight_.fetch_add(1, std::memory_order_acq_rel);
    box.cv.notify_one();
  }

  /// Pops the oldest envelope for `dst`; FIFO per sender is verified through
  /// the sequence numbers.
  std::optional<Envelope> try_receive(PlaceId dst) {
    auto& box = *boxes_.at(dst);
    if (box.count.load(std::memory_order_acquire) == 0) return std::nullopt;
    std::lock_guard lk(box.m);
    if (box.q.empty()) return std::nullopt;
    Envelope env = std::move(box.q.front());
    box.q.pop_front();
    box.count.fetch_sub(1, std::memory_order_release);
    auto& expected = box.delivered_from[env.src];
    if (env.seq != expected)
      throw ProtocolError("out-of-order delivery " + std::to_string(env.src) + "->" + std::to_string(dst));
    ++expected;
    record({TraceEvent::Kind::Deliver, env.src, dst, env.seq, static_cast<MessageTag>(env.payload.at(4))});
    in_flight_.fetch_sub(1, std::memory_order_acq_rel);
    return env;
  }

  std::size_t pending(PlaceId dst) const { return boxes_.at(dst)->count.load(std::memory_order_acquire); }
  bool mailbox_empty(PlaceId dst) const { return pending(dst) == 0; }

  std::uint64_t sent(PlaceId src, PlaceId dst) const {
    auto& box = *boxes_.at(dst);
    std::lock_guard lk(box.m);
    return box.sent_from.at(src);
  }
  std::uint64_t delivered(PlaceId src, PlaceId dst) const {
    auto& box = *boxes_.at(dst);
    std::lock_guard lk(box.m);
    return box.delivered_from.at(src);
  }
  std::uint64_t total_sent() const { return total(&Mailbox::sent_from); }
  std::uint64_t total_delivered() const { return total(&Mailbox::delivered_from); }
  std::int64_t in_flight() const noexcept { return in_flight_.load(std::memory_order_acquire); }

  void set_idle(PlaceId p, bool idle) { idle_[p].store(idle, std::memory_order_release); }
  bool idle(PlaceId p) const { return idle_[p].load(std::memory_order_acquire); }
  bool all_idle() const {
    for (std::size_t i = 0; i < size(); ++i)
      if (!idle(i)) return false;
    return true;
  }

  /// Every place idle, every mailbox empty and sent == delivered on every
  /// ordered pair. Only meaningful at a consistent point: between steps in
  /// deterministic mode, under the exclusive step lock in parallel mode.
  bool quiescent() const {
    if (!all_idle()) return false;
    for (const auto& box : boxes_) {
      std::lock_guard lk(box->m);
      if (!box->q.empty()) return false;
      if (box->sent_from != box->delivered_from) return false;
    }
    return true;
  }

  /// Blocks until mail arrives for `p`, the group is stopped, or `timeout`.
  void wait_for_mail(PlaceId p, std::chrono::microseconds timeout) {
    auto& box = *boxes_[p];
    std::unique_lock lk(box.m);
    box.cv.wait_for(lk, timeout, [&] { return !box.q.empty() || stopped(); });
  }

  void stop() {
    stopped_.store(true, std::memory_order_release);
    for (auto& box : boxes_) {
      std::lock_guard lk(box->m);
      box->cv.notify_all();
    }
  }
  bool stopped() const noexcept { return stopped_.load(std::memory_order_acquire); }

  std::shared_mutex& step_lock() { return step_lock_; }

  const std::vector<TraceEvent>& trace() const noexcept { return trace_; }
  /// FNV-1a over every send/deliver event; deterministic mode only.
  std::uint64_t trace_hash() const noexcept { return trace_hash_; }

 private:
  struct Mailbox {
    explicit Mailbox(std::size_t places) : sent_from(places, 0), delivered_from(places, 0) {}
    mutable std::mutex m;
    std::condition_variable cv;
    std::deque<Envelope> q;
    std::atomic<std::size_t> count{0};
    std::vector<std::uint64_t> sent_from;
    std::vector<std::uint64_t> delivered_from;
  };

  std::uint64_t total(std::vector<std::uint64_t> Mailbox::*field) const {
    std::uint64_t sum = 0;
    for (const auto& box : boxes_) {
      std::lock_guard lk(box->m);
      for (auto v : (*box).*field) sum += v;
    }
    return sum;
  }

  void record(const TraceEvent& e) {
    if (mode_ != SchedulerMode::Deterministic) return;
    auto mix = [&](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        trace_hash_ ^= (v >> (8 * i)) & 0xFFu;
        trace_hash_ *= 0x100000001b3ULL;
      }
    };
    mix(static_cast<std::uint64_t>(e.kind));
    mix(e.src);
    mix(e.dst);
    mix(e.seq);
    mix(static_cast<std::uint64_t>(e.tag));
    if (keep_trace_) trace_.push_back(e);
  }

  std::vector<std::unique_ptr<Mailbox>> boxes_;
  std::unique_ptr<std::atomic<bool>[]> idle_;
  std::atomic<std::int64_t> in_flight_{0};
  std::atomic<bool> stopped_{false};
  std::shared_mutex step_lock_;
  SchedulerMode mode_;
  std::uint64_t seed_;
  bool keep_trace_;
  std::vector<TraceEvent> trace_;
  std::uint64_t trace_hash_ = 0xcbf29ce484222325ULL;
};

inline std::unique_ptr<PlaceGroup> spawn_places(std::size_t places, SchedulerMode mode, std::uint64_t seed,
                                                bool keep_trace = false) {
  return std::make_unique<PlaceGroup>(places, mode, seed, keep_trace);
}

/// What the schedulers need from a per-place worker.
template <class W>
concept SteppableWorker = requires(W w, const W cw) {
  w.step();
  { cw.runnable() } -> std::convertible_to<bool>;  // has local work (ignores mail)
  { cw.idle() } -> std::convertible_to<bool>;      // inactive with an empty bag
  { cw.mode_name() } -> std::convertible_to<std::string>;
};

namespace detail {

template <class W>
[[noreturn]] void throw_timeout(const PlaceGroup& g, const std::vector<W>& workers, double budget) {
  std::ostringstream os;
  os << "quiescence not reached within " << budget << " s;";
  for (std::size_t i = 0; i < workers.size(); ++i)
    os << " place " << i << "=" << workers[i].mode_name() << "(mail " << g.pending(i) << ")";
  throw TimeoutError(os.str());
}

template <class W>
void run_deterministic(PlaceGroup& g, std::vector<W>& workers, std::chrono::duration<double> budget) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(g.seed());
  std::vector<std::size_t> order(workers.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::uint64_t round = 0;; ++round) {
    for (std::size_t i = 0; i < workers.size(); ++i) g.set_idle(i, workers[i].idle());
    if (g.quiescent()) return;
    if ((round & 0x3FF) == 0 && std::chrono::steady_clock::now() - start > budget)
      throw_timeout(g, workers, budget.count());
    // Fisher-Yates with the same top-bits draw as random_victim.
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * i) >> 64);
      std::swap(order[i - 1], order[j]);
    }
    for (auto p : order)
      if (workers[p].runnable() || !g.mailbox_empty(p)) workers[p].step();
  }
}

template <class W>
void run_parallel(PlaceGroup& g, std::vector<W>& workers, std::chrono::duration<double> budget) {
  std::mutex err_m;
  std::exception_ptr err;
  for (std::size_t i = 0; i < workers.size(); ++i) g.set_idle(i, false);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers.size());
    for (std::size_t i = 0; i < workers.size(); ++i) {
      threads.emplace_back([&, i] {
        auto& w = workers[i];
        try {
          while (!g.stopped()) {
            {
              std::shared_lock lk(g.step_lock());
              if (g.stopped()) break;
              if (w.runnable() || !g.mailbox_empty(i)) w.step();
              g.set_idle(i, w.idle());
            }
            if (!w.runnable()) g.wait_for_mail(i, std::chrono::milliseconds(2));
          }
        } catch (...) {
          {
            std::lock_guard lk(err_m);
            if (!err) err = std::current_exception();
          }
          g.stop();
        }
      });
    }

    const auto start = std::chrono::steady_clock::now();
    while (!g.stopped()) {
      if (g.all_idle() && g.in_flight() == 0) {
        std::unique_lock lk(g.step_lock());
        if (g.quiescent()) {
          g.stop();
          break;
        }
      }
      if (std::chrono::steady_clock::now() - start > budget) {
        std::unique_lock lk(g.step_lock());
        g.stop();
        lk.unlock();
        threads.clear();
        throw_timeout(g, workers, budget.count());
      }
      std::this_thread::sleep_for(std::chrono::microseconds(100));
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// Drives every worker until the group is quiescent. Rethrows the first
/// worker failure; throws TimeoutError past `budget`.
template <SteppableWorker W>
void run_until_quiescent(PlaceGroup& g, std::vector<W>& workers,
                         std::chrono::duration<double> budget = std::chrono::duration<double>(600.0)) {
  if (workers.size() != g.size()) throw ConfigError("one worker per place required");
  if (g.mode() == SchedulerMode::Deterministic)
    detail::run_deterministic(g, workers, budget);
  else
    detail::run_parallel(g, workers, budget);
}

}  // namespace glb
