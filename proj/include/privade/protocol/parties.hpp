#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "privade/audit/cnczk.hpp"
#include "privade/commit/commitment.hpp"
#include "privade/protocol/config.hpp"
#include "privade/protocol/payloads.hpp"
#include "privade/selection/dataset.hpp"
#include "privade/selection/selection.hpp"
#include "privade/split/split_model.hpp"

namespace privade::protocol {

/// Scripted deviations. Each one is played by a single party; the other two
/// stay honest.
enum class Adversary {
  None,
  AliceWrongThetaA,
  BobWrongXToDealer,
  BobBadRepset,
  BobCpBadOpening,
  BobCpWitnessOutsideRep,
  BobCpMissingResponses,
  BobBadIndices,
  BobTamperedActivations,
  BobWrongThetaB,
  BobSubstitutedInput,
  BobForgedMerklePath,
  AliceWrongThetaC,
  AliceCorruptCLayer,
  AliceWrongCInput,
  AliceOutputMismatch,
  AliceBadSubscoreOpening,
  BobPermutedLabels,
  BobAlteredFeaturesSubscore,
  ReplayedMessage,
  EarlyTerminationBob,
};

const char* to_string(Adversary a);
// All deviations except None, in catalogue order.
const std::vector<Adversary>& adversary_catalogue();
// InvalidConfig for unknown names; "none" maps to None.
Adversary parse_adversary(const std::string& name);
PartyId adversary_party(Adversary a);

struct PartyOutcome {
  bool done = false;
  std::optional<scoring::ScoreReport> report;
  bool aborted = false;
  int stage = 0;
  AbortCode code = AbortCode::Violation;
  std::string reason;
  bool originated = false;  // this party raised the abort
  bool withdrew = false;    // adversary stopped responding
};

/// Event-driven protocol participant. Transports deliver frames in hub order
/// and send whatever the actor returns.
class Actor {
 public:
  virtual ~Actor() = default;
  virtual PartyId id() const = 0;
  virtual std::vector<Message> start() { return {}; }

  std::vector<Message> receive(const Message& m);
  // Called when nothing arrives within the timeout.
  std::vector<Message> timeout();

  bool finished() const { return outcome_.done || outcome_.aborted || outcome_.withdrew; }
  const PartyOutcome& outcome() const { return outcome_; }
  std::vector<std::string> checks() const { return checks_; }

 protected:
  virtual std::vector<Message> handle(Step step, const Message& m) = 0;

  std::vector<Message> abort(std::string reason, AbortCode code = AbortCode::Violation);
  Message send(Step s, PartyId to, Bytes body) const { return make_message(s, id(), to, std::move(body)); }
  void expect(std::initializer_list<Step> steps) { expected_ = steps; }
  void finish(const scoring::ScoreReport& r);
  void withdraw() { outcome_.withdrew = true; }
  void passed(std::string check) { checks_.push_back(std::move(check)); }

  int stage_ = 0;
  std::set<Step> expected_;

 private:
  PartyOutcome outcome_;
  std::uint64_t last_seq_ = 0;
  std::vector<std::string> checks_;
};

struct AliceInput {
  numerics::Model model;
  std::size_t cut_bc = 0;  // 0: the model's own split manifest
};

struct BobInput {
  selection::Dataset data;
};

// Mixer seed and per-party randomness streams derive from config.seed.
split::SplitModel prepare_split(const AliceInput& in, const RunConfig& config);

std::unique_ptr<Actor> make_alice(const split::SplitModel& model, const RunConfig& config, Adversary adv);
std::unique_ptr<Actor> make_bob(const selection::Dataset& data, const RunConfig& config, Adversary adv);
std::unique_ptr<Actor> make_dealer(const RunConfig& config);

}  // namespace privade::protocol
