#pragma once

#include <concepts>
#include <cstdint>
#include <optional>

#include "glb/codec.hpp"

namespace glb {

/// A splittable, mergeable multiset of relocatable task items.
///   split(): give away roughly half, or nullopt when too small to split.
///   merge(): absorb an incoming bag; sizes add.
template <class B>
concept TaskBag = std::movable<B> && requires(B b, const B cb, ByteWriter& w) {
  { cb.size() } -> std::convertible_to<std::uint64_t>;
  { b.split() } -> std::same_as<std::optional<B>>;
  b.merge(std::move(b));
  cb.encode(w);
};

/// Per-place workload engine.
///
/// process(n) runs up to n items and returns true iff n items were
/// available; false means the bag is drained. split/merge forward to the
/// bag. reduce() must be associative and commutative with identity() as
/// its neutral element; results of all places are folded with it at
/// quiescence. items_processed() is the running count of processed items
/// and decode_bag() rebuilds a bag shipped from another place.
template <class Q>
concept TaskQueue = std::movable<Q> && TaskBag<typename Q::bag_type> &&
                    requires(Q q, const Q cq, std::size_t n, typename Q::bag_type bag, ByteReader& r,
                             const typename Q::result_type& z) {
                      typename Q::result_type;
                      { q.process(n) } -> std::same_as<bool>;
                      { q.split() } -> std::same_as<std::optional<typename Q::bag_type>>;
                      q.merge(std::move(bag));
                      { cq.size() } -> std::convertible_to<std::uint64_t>;
                      { cq.items_processed() } -> std::convertible_to<std::uint64_t>;
                      { cq.result() } -> std::convertible_to<typename Q::result_type>;
                      { cq.identity() } -> std::same_as<typename Q::result_type>;
                      { cq.reduce(z, z) } -> std::same_as<typename Q::result_type>;
                      { cq.decode_bag(r) } -> std::same_as<typename Q::bag_type>;
                    };

}  // namespace glb
