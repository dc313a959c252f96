#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "privade/protocol/transcript.hpp"
#include "privade/selection/dataset.hpp"
#include "privade/split/split_model.hpp"

namespace privade::protocol {

struct SecretPattern {
  std::string label;  // e.g. "x[17]", "theta_A layer 0 tensor 1"
  Bytes bytes;        // raw int32 LE payload as it would appear on the wire
};

/// Byte patterns each party must never observe.
struct LeakageSecrets {
  std::vector<SecretPattern> hidden_from_p1;  // features, labels, unmixed A activations
  std::vector<SecretPattern> hidden_from_p2;  // theta_A, theta_C
};

struct LeakageFinding {
  PartyId observer = PartyId::Hub;
  std::uint64_t seq = 0;
  std::string secret;
};

struct LeakageReport {
  std::vector<LeakageFinding> findings;
  std::size_t p1_bytes = 0, p2_bytes = 0, patterns = 0;
  bool clean() const { return findings.empty(); }
  nlohmann::json to_json() const;
};

// Patterns shorter than 8 bytes or entirely zero are skipped.
LeakageSecrets collect_secrets(const split::SplitModel& model, const selection::Dataset& data,
                               const std::vector<std::size_t>& rep);

// Scans every frame a party sends or receives, after zeroing explicitly
// tagged audit revelations, for any secret pattern hidden from that party.
LeakageReport scan_leakage(const Transcript& transcript, const LeakageSecrets& secrets);

}  // namespace privade::protocol
