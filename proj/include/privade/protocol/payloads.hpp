#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "privade/audit/cnczk.hpp"
#include "privade/audit/cp.hpp"
#include "privade/commit/merkle.hpp"
#include "privade/numerics/model.hpp"
#include "privade/protocol/message.hpp"
#include "privade/scoring/scoring.hpp"

namespace privade::protocol {

using commit::Commitment;
using numerics::FixedTensor;

/// Protocol position of a message. Every body starts with this byte, so a
/// frame can be parsed without any party state.
enum class Step : std::uint8_t {
  ModelCommit = 1,       // P1 -> P2
  DataCommit = 2,        // P2 -> P1
  CoinRevealA = 3,       // P1 -> P2
  CoinRevealB = 4,       // P2 -> P1
  RepIndices = 5,        // P2 -> P1
  CpChallenge = 6,       // P1 -> P2
  CpProof = 7,           // P2 -> P1
  InferInputP1 = 8,      // P1 -> dealer
  WeightsB = 9,          // P1 -> P2
  InferInputP2 = 10,     // P2 -> dealer
  InferOutputP1 = 11,    // dealer -> P1
  InferOutputP2 = 12,    // dealer -> P2
  ActivationsB = 13,     // P2 -> P1
  ChallengeB = 14,       // P1 -> P2
  ProofB = 15,           // P2 -> P1
  OutputCommitC = 16,    // P1 -> P2
  ChallengeC = 17,       // P2 -> P1
  ProofC = 18,           // P1 -> P2
  AckC = 19,             // P2 -> P1
  SubScoreInputP2 = 20,  // P2 -> dealer
  SubScoreInputP1 = 21,  // P1 -> dealer
  ScoreP1 = 22,          // dealer -> P1
  ScoreP2 = 23,          // dealer -> P2
  Abort = 0xFF,
};
const char* to_string(Step s);

struct StepInfo {
  Step step;
  MessageKind kind;
  PartyId sender;
  PartyId receiver;
  int stage;
};
// Table of the 23 regular steps in protocol order.
const std::vector<StepInfo>& step_table();
const StepInfo& step_info(Step s);

Step peek_step(const Message& m);

struct ModelCommitMsg {
  Commitment com_a, com_b, com_c, coin;
  Bytes arch_c;  // block C as a model file with zeroed weights
};

struct DataCommitMsg {
  std::vector<Commitment> com_x, com_y;
  Commitment coin;
};

struct CoinRevealMsg {
  Bytes contribution, randomness;
};

struct IndicesMsg {
  std::vector<std::uint64_t> rep;
};

struct CpChallengeMsg {
  std::vector<std::uint64_t> indices;
};

struct CpProofMsg {
  std::vector<audit::CpResponse> responses;
};

struct InferInputP1Msg {
  Bytes block_a;  // model file
  Bytes r_a;
  std::vector<std::uint64_t> rep;
  std::vector<Commitment> com_x_rep;
};

struct WeightsMsg {
  Bytes block_b;  // model file
  Bytes r_b;
};

struct InferInputP2Msg {
  std::vector<std::uint64_t> rep;
  std::vector<FixedTensor> x_rep;
  std::vector<Bytes> r_x_rep;
  Commitment com_a;
};

struct InferOutputP1Msg {
  std::vector<Commitment> com_act;
};

struct InferOutputP2Msg {
  std::vector<FixedTensor> act;
  std::vector<Bytes> r_act;
  std::vector<Commitment> com_act;
};

struct ActivationsMsg {
  std::vector<FixedTensor> a_b;
  audit::TraceCommitment roots;
};

struct ChallengeMsg {
  audit::Challenge challenge;
};

struct ProofMsg {
  audit::CnczkProof proof;
};

struct OutputCommitMsg {
  std::vector<Commitment> com_pred;
  audit::TraceCommitment roots;
  Bytes r_c;
};

struct AckMsg {
  std::string note;
};

/// Public values both parties hand to the SubScore functionality; the dealer
/// requires the two copies to agree byte for byte.
struct SubScorePublicMsg {
  std::vector<Commitment> com_x;
  std::vector<std::uint64_t> rep;
  commit::MerkleRoot output_root;
  Bytes scoring_config;  // JSON text
};

struct SubScoreInputP2Msg {
  SubScorePublicMsg pub;
  std::vector<FixedTensor> features;
  std::vector<Bytes> r_features;
  std::vector<FixedTensor> labels;
  std::vector<Bytes> r_labels;
  std::vector<Commitment> com_pred;
};

struct SubScoreInputP1Msg {
  SubScorePublicMsg pub;
  std::vector<FixedTensor> predictions;
  std::vector<Bytes> r_predictions;
  std::vector<commit::MerklePath> paths;
  std::vector<Commitment> com_labels;
};

struct ScoreMsg {
  std::int32_t l = 0, u = 0, d = 0, phi = 0;
  std::uint64_t k = 0;
};

enum class AbortCode : std::uint8_t {
  Violation = 0,  // a check failed against the sender's counterpart
  Voluntary = 1,  // P2 declines after its own d' check
  Timeout = 2,
};
const char* to_string(AbortCode c);

struct AbortMsg {
  std::uint8_t stage = 0;
  AbortCode code = AbortCode::Violation;
  std::string reason;
};

// Body encoders: step byte followed by the fields.
Bytes encode(const ModelCommitMsg& m);
Bytes encode(const DataCommitMsg& m);
Bytes encode(Step s, const CoinRevealMsg& m);
Bytes encode(const IndicesMsg& m);
Bytes encode(const CpChallengeMsg& m);
Bytes encode(const CpProofMsg& m);
Bytes encode(const InferInputP1Msg& m);
Bytes encode(const WeightsMsg& m);
Bytes encode(const InferInputP2Msg& m);
Bytes encode(const InferOutputP1Msg& m);
Bytes encode(const InferOutputP2Msg& m);
Bytes encode(const ActivationsMsg& m);
Bytes encode(Step s, const ChallengeMsg& m);
Bytes encode(Step s, const ProofMsg& m);
Bytes encode(const OutputCommitMsg& m);
Bytes encode(const AckMsg& m);
Bytes encode(const SubScoreInputP2Msg& m);
Bytes encode(const SubScoreInputP1Msg& m);
Bytes encode(Step s, const ScoreMsg& m);
Bytes encode(const AbortMsg& m);

// Decoders check the step byte and that the body is fully consumed; any
// mismatch throws Malformed.
ModelCommitMsg decode_model_commit(ByteView body);
DataCommitMsg decode_data_commit(ByteView body);
CoinRevealMsg decode_coin_reveal(ByteView body, Step s);
IndicesMsg decode_indices(ByteView body);
CpChallengeMsg decode_cp_challenge(ByteView body);
CpProofMsg decode_cp_proof(ByteView body);
InferInputP1Msg decode_infer_input_p1(ByteView body);
WeightsMsg decode_weights(ByteView body);
InferInputP2Msg decode_infer_input_p2(ByteView body);
InferOutputP1Msg decode_infer_output_p1(ByteView body);
InferOutputP2Msg decode_infer_output_p2(ByteView body);
ActivationsMsg decode_activations(ByteView body);
ChallengeMsg decode_challenge(ByteView body, Step s);
ProofMsg decode_proof(ByteView body, Step s);
OutputCommitMsg decode_output_commit(ByteView body);
AckMsg decode_ack(ByteView body);
SubScoreInputP2Msg decode_subscore_p2(ByteView body);
SubScoreInputP1Msg decode_subscore_p1(ByteView body);
ScoreMsg decode_score(ByteView body, Step s);
AbortMsg decode_abort(ByteView body);

Bytes encode_public(const SubScorePublicMsg& m);

ScoreMsg to_score_msg(const scoring::ScoreReport& r);
scoring::ScoreReport from_score_msg(const ScoreMsg& m);

// Same architecture with every parameter set to zero.
numerics::Model architecture_only(const numerics::Model& m);

// Malformed unless points are ascending in [0, N) and each layer set is
// ascending within 1..L.
void validate_challenge(const audit::Challenge& c, std::size_t N, std::size_t L);

Message make_message(Step s, PartyId sender, PartyId receiver, Bytes body);

// Copy of the body with audit revelations (transparent-backend openings)
// zeroed; used by the leakage scanner.
Bytes redact_revelations(const Message& m);

}  // namespace privade::protocol
