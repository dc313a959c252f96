#include "privade/protocol/message.hpp"

#include "privade/common/errors.hpp"

namespace privade::protocol {

const char* to_string(PartyId p) {
  switch (p) {
    case PartyId::Hub: return "hub";
    case PartyId::Alice: return "P1";
    case PartyId::Bob: return "P2";
    case PartyId::Dealer: return "dealer";
  }
  return "?";
}

const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Commitments: return "commitments";
    case MessageKind::Indices: return "indices";
    case MessageKind::Challenge: return "challenge";
    case MessageKind::Proof: return "proof";
    case MessageKind::Activations: return "activations";
    case MessageKind::Weights: return "weights";
    case MessageKind::Score: return "score";
    case MessageKind::Abort: return "abort";
    case MessageKind::CoinReveal: return "coin-reveal";
    case MessageKind::DealerInput: return "dealer-input";
    case MessageKind::DealerOutput: return "dealer-output";
    case MessageKind::Ack: return "ack";
  }
  return "?";
}

bool valid_kind(std::uint8_t k) { return k >= 0x01 && k <= 0x0C; }

void write_frame(ByteWriter& w, const Message& m) {
  w.u32_be(static_cast<std::uint32_t>(1 + 8 + 2 + m.body.size()));
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u64_be(m.seq);
  w.u8(static_cast<std::uint8_t>(m.sender));
  w.u8(static_cast<std::uint8_t>(m.receiver));
  w.raw(m.body);
}

Bytes Message::encode() const {
  ByteWriter w;
  write_frame(w, *this);
  return std::move(w).take();
}

Message read_frame(ByteReader& r) {
  std::uint32_t len = r.u32_be();
  if (len < 11 || len > kMaxFrameBytes) fail(ErrorCode::Malformed, "bad frame length");
  ByteReader f(r.raw(len));
  Message m;
  std::uint8_t kind = f.u8();
  if (!valid_kind(kind)) fail(ErrorCode::Malformed, "unknown message kind");
  m.kind = static_cast<MessageKind>(kind);
  m.seq = f.u64_be();
  std::uint8_t s = f.u8(), t = f.u8();
  if (s > 3 || t > 3) fail(ErrorCode::Malformed, "unknown party id");
  m.sender = static_cast<PartyId>(s);
  m.receiver = static_cast<PartyId>(t);
  ByteView rest = f.raw(f.remaining());
  m.body.assign(rest.begin(), rest.end());
  return m;
}

std::vector<Message> decode_frames(ByteView bytes) {
  ByteReader r(bytes);
  std::vector<Message> out;
  while (!r.done()) out.push_back(read_frame(r));
  return out;
}

}  // namespace privade::protocol
