#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <vector>

#include "glb/codec.hpp"
#include "glb/errors.hpp"

namespace glb {

/// Half-open vertex range [low, high).
struct Interval {
  std::uint64_t low = 0;
  std::uint64_t high = 0;

  std::uint64_t size() const noexcept { return high - low; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class SplitStrategy {
  /// Give away a tail of exactly floor(total/2) vertices, bisecting one interval if needed.
  SuffixBalanced,
  /// Halve every interval of size >= 2 and give away the upper halves.
  EachHalved,
};

/// A multiset of vertex ranges that splits in O(#intervals) and merges
/// without touching individual vertices.
class IntervalBag {
 public:
  explicit IntervalBag(SplitStrategy strategy = SplitStrategy::SuffixBalanced) : strategy_(strategy) {}
  IntervalBag(std::initializer_list<Interval> ranges, SplitStrategy strategy = SplitStrategy::SuffixBalanced)
      : strategy_(strategy) {
    for (const auto& r : ranges) push_back(r);
  }

  SplitStrategy strategy() const noexcept { return strategy_; }
  std::uint64_t size() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::size_t interval_count() const noexcept { return ranges_.size(); }
  const std::deque<Interval>& intervals() const noexcept { return ranges_; }

  /// Cumulative number of interval moves performed by merge().
  std::uint64_t merge_moves() const noexcept { return merge_moves_; }

  /// Empty ranges are dropped; low > high is rejected.
  void push_back(Interval r) {
    if (r.high < r.low) throw ConfigError("interval with high < low");
    if (r.size() == 0) return;
    ranges_.push_back(r);
    total_ += r.size();
    check();
  }

  /// Remove up to k vertices from the front.
  std::vector<std::uint64_t> pop(std::uint64_t k) {
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(std::min(k, total_)));
    while (k > 0 && !ranges_.empty()) {
      auto& front = ranges_.front();
      const std::uint64_t take = std::min(k, front.size());
      for (std::uint64_t v = front.low; v < front.low + take; ++v) out.push_back(v);
      front.low += take;
      total_ -= take;
      k -= take;
      if (front.size() == 0) ranges_.pop_front();
    }
    check();
    return out;
  }

  std::optional<IntervalBag> split() {
    return strategy_ == SplitStrategy::SuffixBalanced ? split_suffix() : split_each();
  }

  void merge(IntervalBag&& incoming) {
    if (incoming.strategy_ != strategy_) throw ConfigError("merging interval bags with different split strategies");
    for (const auto& r : incoming.ranges_) {
      ranges_.push_back(r);
      ++merge_moves_;
    }
    total_ += incoming.total_;
    incoming.ranges_.clear();
    incoming.total_ = 0;
    check();
  }

  // [u32 interval count][u64 low, u64 high]*
  void encode(ByteWriter& w) const {
    w.put(static_cast<std::uint32_t>(ranges_.size()));
    for (const auto& r : ranges_) {
      w.put(r.low);
      w.put(r.high);
    }
  }
  static IntervalBag decode(ByteReader& r, SplitStrategy strategy = SplitStrategy::SuffixBalanced) {
    IntervalBag bag(strategy);
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
      Interval iv;
      iv.low = r.get<std::uint64_t>();
      iv.high = r.get<std::uint64_t>();
      if (iv.size() == 0 || iv.high < iv.low) throw ProtocolError("empty or inverted interval on the wire");
      bag.push_back(iv);
    }
    return bag;
  }

  friend bool operator==(const IntervalBag& a, const IntervalBag& b) {
    return a.strategy_ == b.strategy_ && a.ranges_ == b.ranges_;
  }

 private:
  std::optional<IntervalBag> split_suffix() {
    if (total_ < 2) return std::nullopt;
    IntervalBag given(strategy_);
    std::uint64_t remaining = total_ / 2;
    while (remaining > 0) {
      auto& back = ranges_.back();
      if (back.size() <= remaining) {
        remaining -= back.size();
        given.ranges_.push_front(back);
        given.total_ += back.size();
        total_ -= back.size();
        ranges_.pop_back();
      } else {
        const Interval tail{back.high - remaining, back.high};
        back.high = tail.low;
        given.ranges_.push_front(tail);
        given.total_ += tail.size();
        total_ -= tail.size();
        remaining = 0;
      }
    }
    check();
    given.check();
    return given;
  }

  std::optional<IntervalBag> split_each() {
    IntervalBag given(strategy_);
    for (auto& r : ranges_) {
      if (r.size() < 2) continue;
      const std::uint64_t mid = r.low + r.size() / 2;
      given.ranges_.push_back({mid, r.high});
      given.total_ += r.high - mid;
      total_ -= r.high - mid;
      r.high = mid;
    }
    if (given.ranges_.empty()) return std::nullopt;
    check();
    given.check();
    return given;
  }

  void check() const {
#ifndef NDEBUG
    std::uint64_t sum = 0;
    for (const auto& r : ranges_) {
      assert(r.size() > 0);
      sum += r.size();
    }
    assert(sum == total_);
#endif
  }

  std::deque<Interval> ranges_;
  std::uint64_t total_ = 0;
  std::uint64_t merge_moves_ = 0;
  SplitStrategy strategy_;
};

}  // namespace glb
