#pragma once

// Steal-protocol messages and their wire encoding:
//   [u32 length][u8 tag][body]   (length counts the bytes after itself)
//   StealRequest  tag 1: [u32 thief][u8 kind]
//   Deal          tag 2: [u8 kind][bag]
//   NoWork        tag 3: [u8 kind]
//   LifelinePush  tag 4: [bag]

#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "glb/codec.hpp"
#include "glb/errors.hpp"
#include "glb/topology.hpp"

namespace glb {

enum class StealKind : std::uint8_t { Random = 0, Lifeline = 1 };

enum class MessageTag : std::uint8_t { StealRequest = 1, Deal = 2, NoWork = 3, LifelinePush = 4 };

struct StealRequest {
  PlaceId thief = 0;
  StealKind kind = StealKind::Random;
  friend bool operator==(const StealRequest&, const StealRequest&) = default;
};

/// A serialized, non-empty bag handed to a thief.
struct Deal {
  StealKind kind = StealKind::Random;
  Bytes bag;
  friend bool operator==(const Deal&, const Deal&) = default;
};

struct NoWork {
  StealKind kind = StealKind::Random;
  friend bool operator==(const NoWork&, const NoWork&) = default;
};

struct LifelinePush {
  Bytes bag;
  friend bool operator==(const LifelinePush&, const LifelinePush&) = default;
};

using Message = std::variant<StealRequest, Deal, NoWork, LifelinePush>;

inline MessageTag tag_of(const Message& m) {
  return static_cast<MessageTag>(m.index() + 1);
}

inline std::string_view tag_name(MessageTag t) {
  switch (t) {
    case MessageTag::StealRequest: return "steal";
    case MessageTag::Deal: return "deal";
    case MessageTag::NoWork: return "nowork";
    case MessageTag::LifelinePush: return "push";
  }
  return "?";
}

inline Bytes encode_message(const Message& m) {
  Bytes out;
  ByteWriter w(out);
  w.put(std::uint32_t{0});
  w.put(static_cast<std::uint8_t>(tag_of(m)));
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, StealRequest>) {
          w.put(static_cast<std::uint32_t>(msg.thief));
          w.put(static_cast<std::uint8_t>(msg.kind));
        } else if constexpr (std::is_same_v<T, Deal>) {
          w.put(static_cast<std::uint8_t>(msg.kind));
          w.put_raw(msg.bag);
        } else if constexpr (std::is_same_v<T, NoWork>) {
          w.put(static_cast<std::uint8_t>(msg.kind));
        } else {
          w.put_raw(msg.bag);
        }
      },
      m);
  w.patch_u32(0, static_cast<std::uint32_t>(out.size() - 4));
  return out;
}

inline StealKind decode_kind(ByteReader& r) {
  const auto k = r.get<std::uint8_t>();
  if (k > 1) throw ProtocolError("unknown steal kind " + std::to_string(k));
  return static_cast<StealKind>(k);
}

inline Message decode_message(std::span<const std::byte> payload) {
  ByteReader r(payload);
  const auto length = r.get<std::uint32_t>();
  if (length != r.remaining()) throw ProtocolError("payload length prefix mismatch");
  const auto tag = r.get<std::uint8_t>();
  switch (static_cast<MessageTag>(tag)) {
    case MessageTag::StealRequest: {
      StealRequest m;
      m.thief = r.get<std::uint32_t>();
      m.kind = decode_kind(r);
      return m;
    }
    case MessageTag::Deal: {
      Deal m;
      m.kind = decode_kind(r);
      auto rest = r.rest();
      m.bag.assign(rest.begin(), rest.end());
      return m;
    }
    case MessageTag::NoWork:
      return NoWork{decode_kind(r)};
    case MessageTag::LifelinePush: {
      auto rest = r.rest();
      return LifelinePush{Bytes(rest.begin(), rest.end())};
    }
  }
  throw ProtocolError("unknown message tag " + std::to_string(tag));
}

}  // namespace glb
