#pragma once

#include <string>
#include <vector>

#include "privade/protocol/message.hpp"

namespace privade::protocol {

/// Ordered frames as relayed by the hub. seq is assigned by the hub and is
/// strictly increasing.
struct Transcript {
  std::vector<Message> frames;

  Bytes encode() const;
  static Transcript decode(ByteView bytes);  // MalformedTranscript on bad framing
  void save(const std::string& path) const;
  static Transcript load(const std::string& path);

  std::size_t total_bytes() const;
};

bool visible_to(const Message& m, PartyId party);

// Frames a third party may audit: everything between P1 and P2 plus the
// dealer's outputs to P1 (commitments and the score). Dealer inputs and the
// dealer's private output to P2 are dropped.
Transcript public_view(const Transcript& t);

// Concatenated frames visible to `party`.
std::vector<const Message*> frames_visible_to(const Transcript& t, PartyId party);

}  // namespace privade::protocol
