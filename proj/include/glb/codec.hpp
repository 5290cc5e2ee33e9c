#pragma once

// Little-endian byte codec used at the place boundary. Every bag that crosses
// places goes through ByteWriter/ByteReader, so receivers never alias sender
// state.

#include <array>
#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "glb/errors.hpp"

namespace glb {

using Bytes = std::vector<std::byte>;

class ByteWriter {
 public:
  explicit ByteWriter(Bytes& sink) : out_(&sink) {}

  template <std::unsigned_integral T>
  void put(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_->push_back(static_cast<std::byte>(value & 0xFFu));
      if constexpr (sizeof(T) > 1) value >>= 8;
    }
  }
  template <std::signed_integral T>
  void put(T value) {
    put(static_cast<std::make_unsigned_t<T>>(value));
  }
  void put(double value) { put(std::bit_cast<std::uint64_t>(value)); }

  void put_raw(std::span<const std::byte> raw) { out_->insert(out_->end(), raw.begin(), raw.end()); }
  template <std::size_t N>
  void put_raw(const std::array<std::uint8_t, N>& raw) {
    put_raw(std::as_bytes(std::span(raw)));
  }

  Bytes& bytes() { return *out_; }
  std::size_t size() const { return out_->size(); }

  /// Overwrite a previously reserved u32 slot (used for length prefixes).
  void patch_u32(std::size_t offset, std::uint32_t value) {
    for (std::size_t i = 0; i < 4; ++i) (*out_)[offset + i] = static_cast<std::byte>((value >> (8 * i)) & 0xFFu);
  }

 private:
  Bytes* out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> in) : in_(in) {}

  template <std::unsigned_integral T>
  T get() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      value |= static_cast<T>(static_cast<T>(std::to_integer<std::uint8_t>(in_[pos_ + i])) << (8 * i));
    pos_ += sizeof(T);
    return value;
  }
  template <std::signed_integral T>
  T get() {
    return static_cast<T>(get<std::make_unsigned_t<T>>());
  }
  double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }

  template <std::size_t N>
  void get_raw(std::array<std::uint8_t, N>& raw) {
    need(N);
    std::memcpy(raw.data(), in_.data() + pos_, N);
    pos_ += N;
  }
  std::span<const std::byte> rest() const { return in_.subspan(pos_); }
  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw ProtocolError("truncated payload");
  }

  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

/// Per-item codec for ListBag. Specialize for custom item types.
template <class T>
struct ItemCodec;

template <class T>
  requires std::integral<T>
struct ItemCodec<T> {
  static void encode(ByteWriter& w, const T& v) { w.put(v); }
  static T decode(ByteReader& r) { return r.template get<T>(); }
};

template <>
struct ItemCodec<double> {
  static void encode(ByteWriter& w, double v) { w.put(v); }
  static double decode(ByteReader& r) { return r.get_double(); }
};

}  // namespace glb
