#pragma once

// Unbalanced Tree Search over geometric trees. Nodes are identified by a
// SHA-1 descriptor; the i-th child of a node is SHA1(parent || be32(i)) and
// the root is SHA1(be32(seed)). The branching factor of a node is drawn
// from a geometric law with mean b0 using the first four digest bytes, and
// no node at depth >= d has children. Only non-root nodes are counted.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "glb/codec.hpp"
#include "glb/errors.hpp"

namespace glb::uts {

struct Descriptor {
  std::array<std::uint8_t, 20> digest{};
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
  friend auto operator<=>(const Descriptor&, const Descriptor&) = default;
};

namespace detail {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const noexcept { EVP_MD_CTX_free(c); }
};

inline const EVP_MD* sha1_md() {
  static const std::unique_ptr<EVP_MD, decltype(&EVP_MD_free)> md(EVP_MD_fetch(nullptr, "SHA1", nullptr),
                                                                  &EVP_MD_free);
  if (!md) throw std::runtime_error("OpenSSL provides no SHA1");
  return md.get();
}

inline Descriptor sha1(std::span<const std::uint8_t> data) {
  thread_local std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  Descriptor out;
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), sha1_md(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.digest.data(), &len) != 1 || len != out.digest.size())
    throw std::runtime_error("SHA1 digest failed");
  return out;
}

inline void put_be32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

}  // namespace detail

struct Params {
  double b0 = 4.0;         // expected branching factor
  std::uint32_t seed = 19; // root seed r
  std::uint32_t depth = 10;  // cutoff d

  void validate() const {
    if (!(b0 > 1.0)) throw ConfigError("UTS branching factor b0 must exceed 1");
    if (depth < 1) throw ConfigError("UTS depth cutoff must be >= 1");
  }
};

inline Descriptor root_descriptor(std::uint32_t seed) {
  std::array<std::uint8_t, 4> buf{};
  detail::put_be32(buf.data(), seed);
  return detail::sha1(buf);
}

inline Descriptor spawn_child(const Descriptor& parent, std::uint32_t index) {
  std::array<std::uint8_t, 24> buf{};
  std::copy(parent.digest.begin(), parent.digest.end(), buf.begin());
  detail::put_be32(buf.data() + 20, index);
  return detail::sha1(buf);
}

/// The uniform variate in [0, 1) read from the first four digest bytes.
inline double uniform_of(const Descriptor& d) {
  const std::uint32_t x = (std::uint32_t{d.digest[0]} << 24) | (std::uint32_t{d.digest[1]} << 16) |
                          (std::uint32_t{d.digest[2]} << 8) | std::uint32_t{d.digest[3]};
  return static_cast<double>(x) / 4294967296.0;
}

/// floor(ln(1-v) / ln(1-p)) with p = 1/(1+b0); mean b0.
inline std::uint32_t geometric_children(double v, double b0) {
  const double p = 1.0 / (1.0 + b0);
  return static_cast<std::uint32_t>(std::floor(std::log(1.0 - v) / std::log(1.0 - p)));
}

inline std::uint32_t child_count(const Descriptor& d, std::uint32_t depth, const Params& params) {
  if (depth >= params.depth) return 0;
  return geometric_children(uniform_of(d), params.b0);
}

/// A node with unexplored children [low, high).
struct Node {
  Descriptor desc;
  std::uint32_t depth = 0;
  std::uint32_t low = 0;
  std::uint32_t high = 0;

  std::uint32_t remaining() const noexcept { return high - low; }
  friend bool operator==(const Node&, const Node&) = default;
};

/// Bag of partially explored nodes; size() counts unexplored children.
class Bag {
 public:
  Bag() = default;
  Bag(std::initializer_list<Node> nodes) {
    for (const auto& n : nodes) push(n);
  }

  std::uint64_t size() const noexcept { return total_; }
  bool empty() const noexcept { return nodes_.empty(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  /// Nodes without unexplored children are not stored.
  void push(const Node& n) {
    if (n.high < n.low) throw ConfigError("UTS node with high < low");
    if (n.remaining() == 0) return;
    nodes_.push_back(n);
    total_ += n.remaining();
  }

  struct Pick {
    Descriptor parent;
    std::uint32_t depth;
    std::uint32_t index;
  };
  /// Consumes the highest unexplored child index of the last node.
  Pick take() {
    Node& n = nodes_.back();
    Pick p{n.desc, n.depth, --n.high};
    --total_;
    if (n.remaining() == 0) nodes_.pop_back();
    return p;
  }

  /// Halves every node with at least two unexplored children; nullopt if none has.
  std::optional<Bag> split() {
    Bag given;
    for (auto& n : nodes_) {
      if (n.remaining() < 2) continue;
      const std::uint32_t mid = n.low + n.remaining() / 2;
      given.push({n.desc, n.depth, mid, n.high});
      total_ -= n.high - mid;
      n.high = mid;
    }
    if (given.empty()) return std::nullopt;
    return given;
  }

  void merge(Bag&& incoming) {
    nodes_.insert(nodes_.end(), incoming.nodes_.begin(), incoming.nodes_.end());
    total_ += incoming.total_;
    incoming.nodes_.clear();
    incoming.total_ = 0;
  }

  // [u32 count][20-byte digest, u32 depth, u32 low, u32 high]*
  void encode(ByteWriter& w) const {
    w.put(static_cast<std::uint32_t>(nodes_.size()));
    for (const auto& n : nodes_) {
      w.put_raw(n.desc.digest);
      w.put(n.depth);
      w.put(n.low);
      w.put(n.high);
    }
  }
  static Bag decode(ByteReader& r) {
    Bag bag;
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
      Node n;
      r.get_raw(n.desc.digest);
      n.depth = r.get<std::uint32_t>();
      n.low = r.get<std::uint32_t>();
      n.high = r.get<std::uint32_t>();
      if (n.remaining() == 0 || n.high < n.low) throw ProtocolError("UTS node without unexplored children");
      bag.push(n);
    }
    return bag;
  }

 private:
  std::vector<Node> nodes_;
  std::uint64_t total_ = 0;
};

/// Counts tree nodes; the result is the number of nodes expanded here.
class Queue {
 public:
  using bag_type = Bag;
  using result_type = std::uint64_t;

  explicit Queue(Params params) : params_(params) { params_.validate(); }

  /// Seed the root's children.
  void init() {
    const auto root = root_descriptor(params_.seed);
    bag_.push({root, 0, 0, child_count(root, 0, params_)});
  }

  bool process(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (bag_.empty()) return false;
      const auto pick = bag_.take();
      const auto child = spawn_child(pick.parent, pick.index);
      const auto depth = pick.depth + 1;
      ++count_;
      bag_.push({child, depth, 0, child_count(child, depth, params_)});
    }
    return true;
  }

  std::optional<Bag> split() { return bag_.split(); }
  void merge(Bag&& incoming) { bag_.merge(std::move(incoming)); }
  Bag decode_bag(ByteReader& r) const { return Bag::decode(r); }

  std::uint64_t size() const noexcept { return bag_.size(); }
  std::uint64_t items_processed() const noexcept { return count_; }
  const Bag& bag() const noexcept { return bag_; }
  const Params& params() const noexcept { return params_; }

  result_type result() const noexcept { return count_; }
  result_type identity() const noexcept { return 0; }
  result_type reduce(result_type a, result_type b) const noexcept { return a + b; }

 private:
  Params params_;
  Bag bag_;
  std::uint64_t count_ = 0;
};

/// Single-place depth-first count of every non-root node.
inline std::uint64_t count_sequential(const Params& params) {
  params.validate();
  struct Frame {
    Descriptor desc;
    std::uint32_t depth;
  };
  std::vector<Frame> stack{{root_descriptor(params.seed), 0}};
  std::uint64_t count = 0;
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const auto kids = child_count(f.desc, f.depth, params);
    for (std::uint32_t i = 0; i < kids; ++i) {
      ++count;
      stack.push_back({spawn_child(f.desc, i), f.depth + 1});
    }
  }
  return count;
}

}  // namespace glb::uts
