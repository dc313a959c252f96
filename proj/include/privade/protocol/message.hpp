#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "privade/common/bytes.hpp"

namespace privade::protocol {

enum class PartyId : std::uint8_t { Hub = 0, Alice = 1, Bob = 2, Dealer = 3 };
const char* to_string(PartyId p);

enum class MessageKind : std::uint8_t {
  Commitments = 0x01,
  Indices = 0x02,
  Challenge = 0x03,
  Proof = 0x04,
  Activations = 0x05,
  Weights = 0x06,
  Score = 0x07,
  Abort = 0x08,
  CoinReveal = 0x09,
  DealerInput = 0x0A,
  DealerOutput = 0x0B,
  Ack = 0x0C,
};
const char* to_string(MessageKind k);
bool valid_kind(std::uint8_t k);

/// One protocol message. On the wire: u32 BE length of the rest, u8 kind,
/// u64 BE seq, then payload = sender u8, receiver u8, body.
struct Message {
  MessageKind kind = MessageKind::Ack;
  std::uint64_t seq = 0;
  PartyId sender = PartyId::Hub;
  PartyId receiver = PartyId::Hub;
  Bytes body;

  Bytes encode() const;
  friend bool operator==(const Message&, const Message&) = default;
};

inline constexpr std::uint32_t kMaxFrameBytes = 1U << 30;

void write_frame(ByteWriter& w, const Message& m);
// Malformed on truncation, unknown kind, or bad party id.
Message read_frame(ByteReader& r);
std::vector<Message> decode_frames(ByteView bytes);

}  // namespace privade::protocol
