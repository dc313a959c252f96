#include "privade/protocol/transcript.hpp"

#include "privade/common/errors.hpp"
#include "privade/numerics/model_io.hpp"

namespace privade::protocol {

Bytes Transcript::encode() const {
  ByteWriter w;
  for (const auto& m : frames) write_frame(w, m);
  return std::move(w).take();
}

Transcript Transcript::decode(ByteView bytes) {
  Transcript t;
  try {
    t.frames = decode_frames(bytes);
  } catch (const Error& e) {
    fail(ErrorCode::MalformedTranscript, e.what());
  }
  return t;
}

void Transcript::save(const std::string& path) const { numerics::write_file(path, encode()); }

Transcript Transcript::load(const std::string& path) { return decode(numerics::read_file(path)); }

std::size_t Transcript::total_bytes() const {
  std::size_t n = 0;
  for (const auto& m : frames) n += 4 + 1 + 8 + 2 + m.body.size();
  return n;
}

bool visible_to(const Message& m, PartyId party) { return m.sender == party || m.receiver == party; }

Transcript public_view(const Transcript& t) {
  Transcript out;
  for (const auto& m : t.frames) {
    bool dealer_free = m.sender != PartyId::Dealer && m.receiver != PartyId::Dealer;
    bool dealer_to_p1 = m.sender == PartyId::Dealer && m.receiver == PartyId::Alice;
    if (dealer_free || dealer_to_p1) out.frames.push_back(m);
  }
  return out;
}

std::vector<const Message*> frames_visible_to(const Transcript& t, PartyId party) {
  std::vector<const Message*> out;
  for (const auto& m : t.frames) {
    if (visible_to(m, party)) out.push_back(&m);
  }
  return out;
}

}  // namespace privade::protocol
