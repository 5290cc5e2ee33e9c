#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "glb/codec.hpp"

namespace glb {

/// Default array-backed task bag. split() hands away the trailing half,
/// merge() appends; item order is otherwise preserved.
template <class T>
class ListBag {
 public:
  using value_type = T;

  ListBag() = default;
  ListBag(std::initializer_list<T> items) : items_(items) {}
  explicit ListBag(std::vector<T> items) : items_(std::move(items)) {}

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  void push(T item) { items_.push_back(std::move(item)); }
  T pop() {
    T v = std::move(items_.back());
    items_.pop_back();
    return v;
  }
  T& back() { return items_.back(); }

  const std::vector<T>& items() const noexcept { return items_; }

  /// Fewer than two items cannot be split.
  std::optional<ListBag> split() {
    if (items_.size() < 2) return std::nullopt;
    const std::size_t give = items_.size() / 2;
    const auto first = items_.end() - static_cast<std::ptrdiff_t>(give);
    ListBag out(std::vector<T>(std::make_move_iterator(first), std::make_move_iterator(items_.end())));
    items_.erase(first, items_.end());
    return out;
  }

  void merge(ListBag&& incoming) {
    if (items_.empty()) {
      items_ = std::move(incoming.items_);
    } else {
      items_.insert(items_.end(), std::make_move_iterator(incoming.items_.begin()),
                    std::make_move_iterator(incoming.items_.end()));
    }
    incoming.items_.clear();
  }

  // [u32 count][items]
  void encode(ByteWriter& w) const {
    w.put(static_cast<std::uint32_t>(items_.size()));
    for (const auto& item : items_) ItemCodec<T>::encode(w, item);
  }
  static ListBag decode(ByteReader& r) {
    const auto count = r.get<std::uint32_t>();
    std::vector<T> items;
    items.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) items.push_back(ItemCodec<T>::decode(r));
    return ListBag(std::move(items));
  }

  friend bool operator==(const ListBag&, const ListBag&) = default;

 private:
  std::vector<T> items_;
};

}  // namespace glb
