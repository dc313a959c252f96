#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "privade/protocol/config.hpp"
#include "privade/protocol/payloads.hpp"
#include "privade/protocol/transcript.hpp"

namespace privade::protocol {

struct ReplayVerdict {
  bool consistent = false;
  std::optional<std::uint64_t> violation_seq;
  std::string reason;
  std::size_t frames_checked = 0;
  // Set when the run ended in a (legitimate) abort.
  std::optional<std::uint64_t> abort_seq;
  bool completed = false;  // score frame reached
  AbortCode abort_code = AbortCode::Violation;
  // Publicly checkable deviation that the verifier answered with its abort.
  std::optional<std::uint64_t> deviation_seq;
  std::string deviation;

  nlohmann::json to_json() const;
};

/// Re-checks the public part of a transcript against the public run
/// parameters: framing order, coin reveals, CP responses, the block B weight
/// opening, both CnCZK audits, and that every failed check is followed by the
/// verifier's abort. Dealer inputs and the dealer's output to P2 are ignored.
// Ledger-facing summary: "violation", "voluntary", "timeout", "completed" or
// "incomplete", and the seq a slash should cite.
const char* evidence_verdict(const ReplayVerdict& v);
std::optional<std::uint64_t> evidence_seq(const ReplayVerdict& v);

ReplayVerdict transcript_replay(const Transcript& transcript, const RunConfig& config);

}  // namespace privade::protocol
