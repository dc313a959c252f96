#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "privade/protocol/config.hpp"
#include "privade/protocol/parties.hpp"
#include "privade/protocol/transcript.hpp"

namespace privade::protocol {

struct AbortInfo {
  int stage = 0;
  AbortCode code = AbortCode::Violation;
  PartyId party = PartyId::Hub;
  std::string reason;
  std::uint64_t seq = 0;
};

struct RunResult {
  bool success = false;
  std::optional<scoring::ScoreReport> report;
  std::optional<AbortInfo> abort;
  PartyOutcome alice, bob, dealer;
  Transcript transcript;
  std::optional<Digest> selection_seed;
  std::vector<std::size_t> rep;
  std::uint64_t block_a_queries = 0;  // dealer evaluations of block A
  double seconds = 0.0;  // wall clock, kept out of to_json()

  nlohmann::json to_json() const;
  // "accepted" or "Abort: Stage <n> (<party>): <reason>".
  std::string summary() const;
};

// Full protocol run with the transport chosen in `config`.
RunResult run_privade(const AliceInput& alice, const BobInput& bob, const RunConfig& config,
                      Adversary adversary = Adversary::None);

// Single-threaded FIFO hub: delivers frames in send order, stamps seq, and
// times out the first waiting party when the queue drains.
RunResult drive_in_process(Actor& alice, Actor& bob, Actor& dealer);

// Builds the result from final party states and the hub transcript.
RunResult summarize(const PartyOutcome& alice, const PartyOutcome& bob, const PartyOutcome& dealer,
                    std::vector<std::string> checks, Transcript transcript);

// Seed of the joint coin flip and the published representative indices, as
// recorded in a transcript.
std::optional<Digest> transcript_selection_seed(const Transcript& t);
std::vector<std::size_t> transcript_rep(const Transcript& t);

}  // namespace privade::protocol
