#pragma once

#include <cstdint>
#include <optional>

#include "glb/bags/list_bag.hpp"

namespace glb {

/// Fibonacci by task expansion: item i < 2 contributes i, otherwise it is
/// replaced by i-1 and i-2.
class FibQueue {
 public:
  using bag_type = ListBag<std::uint64_t>;
  using result_type = std::uint64_t;

  FibQueue() = default;
  explicit FibQueue(bag_type bag) : bag_(std::move(bag)) {}

  void init(std::uint64_t n) { bag_.push(n); }

  bool process(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (bag_.empty()) return false;
      const std::uint64_t i = bag_.pop();
      ++processed_;
      if (i < 2) {
        result_ += i;
      } else {
        bag_.push(i - 1);
        bag_.push(i - 2);
      }
    }
    return true;
  }

  std::optional<bag_type> split() { return bag_.split(); }
  void merge(bag_type&& incoming) { bag_.merge(std::move(incoming)); }
  bag_type decode_bag(ByteReader& r) const { return bag_type::decode(r); }

  std::uint64_t size() const noexcept { return bag_.size(); }
  std::uint64_t items_processed() const noexcept { return processed_; }
  const bag_type& bag() const noexcept { return bag_; }

  result_type result() const noexcept { return result_; }
  result_type identity() const noexcept { return 0; }
  result_type reduce(result_type a, result_type b) const noexcept { return a + b; }

 private:
  bag_type bag_;
  result_type result_ = 0;
  std::uint64_t processed_ = 0;
};

/// Iterative reference value.
constexpr std::uint64_t fib_sequential(std::uint64_t n) {
  std::uint64_t a = 0, b = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto t = a + b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace glb
