#include "privade/protocol/payloads.hpp"

#include "privade/commit/records.hpp"
#include "privade/common/errors.hpp"
#include "privade/numerics/model_io.hpp"

namespace privade::protocol {

namespace {

constexpr std::uint32_t kMaxItems = 1U << 24;

std::uint32_t read_count(ByteReader& r) {
  std::uint32_t n = r.u32_be();
  if (n > kMaxItems || n > r.remaining()) fail(ErrorCode::Malformed, "implausible item count");
  return n;
}

void put(ByteWriter& w, const std::vector<Commitment>& v) {
  w.u32_be(static_cast<std::uint32_t>(v.size()));
  for (const auto& c : v) commit::write_record(w, c);
}
void get(ByteReader& r, std::vector<Commitment>& v) {
  v.resize(read_count(r));
  for (auto& c : v) c = commit::read_commitment(r);
}

void put(ByteWriter& w, const std::vector<std::uint64_t>& v) {
  w.u32_be(static_cast<std::uint32_t>(v.size()));
  for (auto x : v) w.u64_be(x);
}
void get(ByteReader& r, std::vector<std::uint64_t>& v) {
  v.resize(read_count(r));
  for (auto& x : v) x = r.u64_be();
}

void put(ByteWriter& w, const std::vector<FixedTensor>& v) {
  w.u32_be(static_cast<std::uint32_t>(v.size()));
  for (const auto& t : v) t.write_to(w);
}
void get(ByteReader& r, std::vector<FixedTensor>& v) {
  v.resize(read_count(r));
  for (auto& t : v) t = FixedTensor::read_from(r);
}

void put(ByteWriter& w, const std::vector<Bytes>& v) {
  w.u32_be(static_cast<std::uint32_t>(v.size()));
  for (const auto& b : v) w.blob(b);
}
void get(ByteReader& r, std::vector<Bytes>& v) {
  v.resize(read_count(r));
  for (auto& b : v) b = r.blob();
}

void put(ByteWriter& w, const std::vector<commit::MerklePath>& v) {
  w.u32_be(static_cast<std::uint32_t>(v.size()));
  for (const auto& p : v) commit::write_record(w, p);
}
void get(ByteReader& r, std::vector<commit::MerklePath>& v) {
  v.resize(read_count(r));
  for (auto& p : v) p = commit::read_merkle_path(r);
}

void put(ByteWriter& w, const SubScorePublicMsg& p) {
  put(w, p.com_x);
  put(w, p.rep);
  commit::write_record(w, p.output_root);
  w.blob(p.scoring_config);
}
void get(ByteReader& r, SubScorePublicMsg& p) {
  get(r, p.com_x);
  get(r, p.rep);
  p.output_root = commit::read_merkle_root(r);
  p.scoring_config = r.blob();
}

ByteWriter start(Step s) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(s));
  return w;
}

ByteReader begin(ByteView body, Step s) {
  ByteReader r(body);
  if (r.u8() != static_cast<std::uint8_t>(s)) {
    fail(ErrorCode::Malformed, std::string("expected ") + to_string(s) + " body");
  }
  return r;
}

template <typename T, typename F>
T parse(ByteView body, Step s, F&& fields) {
  ByteReader r = begin(body, s);
  T out;
  fields(r, out);
  r.expect_done();
  return out;
}

}  // namespace

const char* to_string(Step s) {
  switch (s) {
    case Step::ModelCommit: return "model-commit";
    case Step::DataCommit: return "data-commit";
    case Step::CoinRevealA: return "coin-reveal-p1";
    case Step::CoinRevealB: return "coin-reveal-p2";
    case Step::RepIndices: return "rep-indices";
    case Step::CpChallenge: return "cp-challenge";
    case Step::CpProof: return "cp-proof";
    case Step::InferInputP1: return "inference-input-p1";
    case Step::WeightsB: return "weights-b";
    case Step::InferInputP2: return "inference-input-p2";
    case Step::InferOutputP1: return "inference-output-p1";
    case Step::InferOutputP2: return "inference-output-p2";
    case Step::ActivationsB: return "activations-b";
    case Step::ChallengeB: return "challenge-b";
    case Step::ProofB: return "proof-b";
    case Step::OutputCommitC: return "output-commit-c";
    case Step::ChallengeC: return "challenge-c";
    case Step::ProofC: return "proof-c";
    case Step::AckC: return "ack-c";
    case Step::SubScoreInputP2: return "subscore-input-p2";
    case Step::SubScoreInputP1: return "subscore-input-p1";
    case Step::ScoreP1: return "score-p1";
    case Step::ScoreP2: return "score-p2";
    case Step::Abort: return "abort";
  }
  return "?";
}

const char* to_string(AbortCode c) {
  switch (c) {
    case AbortCode::Violation: return "violation";
    case AbortCode::Voluntary: return "voluntary";
    case AbortCode::Timeout: return "timeout";
  }
  return "?";
}

const std::vector<StepInfo>& step_table() {
  using K = MessageKind;
  constexpr PartyId A = PartyId::Alice, B = PartyId::Bob, D = PartyId::Dealer;
  static const std::vector<StepInfo> table = {
      {Step::ModelCommit, K::Commitments, A, B, 0},   {Step::DataCommit, K::Commitments, B, A, 0},
      {Step::CoinRevealA, K::CoinReveal, A, B, 0},    {Step::CoinRevealB, K::CoinReveal, B, A, 0},
      {Step::RepIndices, K::Indices, B, A, 1},        {Step::CpChallenge, K::Challenge, A, B, 1},
      {Step::CpProof, K::Proof, B, A, 1},             {Step::InferInputP1, K::DealerInput, A, D, 2},
      {Step::WeightsB, K::Weights, A, B, 2},          {Step::InferInputP2, K::DealerInput, B, D, 2},
      {Step::InferOutputP1, K::DealerOutput, D, A, 2}, {Step::InferOutputP2, K::DealerOutput, D, B, 2},
      {Step::ActivationsB, K::Activations, B, A, 2},  {Step::ChallengeB, K::Challenge, A, B, 2},
      {Step::ProofB, K::Proof, B, A, 2},              {Step::OutputCommitC, K::Commitments, A, B, 2},
      {Step::ChallengeC, K::Challenge, B, A, 2},      {Step::ProofC, K::Proof, A, B, 2},
      {Step::AckC, K::Ack, B, A, 2},                  {Step::SubScoreInputP2, K::DealerInput, B, D, 3},
      {Step::SubScoreInputP1, K::DealerInput, A, D, 3}, {Step::ScoreP1, K::Score, D, A, 3},
      {Step::ScoreP2, K::Score, D, B, 3},
  };
  return table;
}

const StepInfo& step_info(Step s) {
  for (const auto& info : step_table()) {
    if (info.step == s) return info;
  }
  fail(ErrorCode::Malformed, "no step info for abort");
}

Step peek_step(const Message& m) {
  if (m.body.empty()) fail(ErrorCode::Malformed, "empty message body");
  std::uint8_t b = m.body[0];
  if (b == 0xFF) return Step::Abort;
  if (b < 1 || b > 23) fail(ErrorCode::Malformed, "unknown step byte");
  return static_cast<Step>(b);
}

Bytes encode(const ModelCommitMsg& m) {
  ByteWriter w = start(Step::ModelCommit);
  commit::write_record(w, m.com_a);
  commit::write_record(w, m.com_b);
  commit::write_record(w, m.com_c);
  commit::write_record(w, m.coin);
  w.blob(m.arch_c);
  return std::move(w).take();
}
ModelCommitMsg decode_model_commit(ByteView body) {
  return parse<ModelCommitMsg>(body, Step::ModelCommit, [](ByteReader& r, ModelCommitMsg& m) {
    m.com_a = commit::read_commitment(r);
    m.com_b = commit::read_commitment(r);
    m.com_c = commit::read_commitment(r);
    m.coin = commit::read_commitment(r);
    m.arch_c = r.blob();
  });
}

Bytes encode(const DataCommitMsg& m) {
  ByteWriter w = start(Step::DataCommit);
  put(w, m.com_x);
  put(w, m.com_y);
  commit::write_record(w, m.coin);
  return std::move(w).take();
}
DataCommitMsg decode_data_commit(ByteView body) {
  return parse<DataCommitMsg>(body, Step::DataCommit, [](ByteReader& r, DataCommitMsg& m) {
    get(r, m.com_x);
    get(r, m.com_y);
    m.coin = commit::read_commitment(r);
  });
}

Bytes encode(Step s, const CoinRevealMsg& m) {
  ByteWriter w = start(s);
  w.blob(m.contribution);
  w.blob(m.randomness);
  return std::move(w).take();
}
CoinRevealMsg decode_coin_reveal(ByteView body, Step s) {
  return parse<CoinRevealMsg>(body, s, [](ByteReader& r, CoinRevealMsg& m) {
    m.contribution = r.blob();
    m.randomness = r.blob();
  });
}

Bytes encode(const IndicesMsg& m) {
  ByteWriter w = start(Step::RepIndices);
  put(w, m.rep);
  return std::move(w).take();
}
IndicesMsg decode_indices(ByteView body) {
  return parse<IndicesMsg>(body, Step::RepIndices, [](ByteReader& r, IndicesMsg& m) { get(r, m.rep); });
}

Bytes encode(const CpChallengeMsg& m) {
  ByteWriter w = start(Step::CpChallenge);
  put(w, m.indices);
  return std::move(w).take();
}
CpChallengeMsg decode_cp_challenge(ByteView body) {
  return parse<CpChallengeMsg>(body, Step::CpChallenge,
                               [](ByteReader& r, CpChallengeMsg& m) { get(r, m.indices); });
}

Bytes encode(const CpProofMsg& m) {
  ByteWriter w = start(Step::CpProof);
  w.u32_be(static_cast<std::uint32_t>(m.responses.size()));
  for (const auto& resp : m.responses) resp.write_to(w);
  return std::move(w).take();
}
CpProofMsg decode_cp_proof(ByteView body) {
  return parse<CpProofMsg>(body, Step::CpProof, [](ByteReader& r, CpProofMsg& m) {
    m.responses.resize(read_count(r));
    for (auto& resp : m.responses) resp = audit::CpResponse::read_from(r);
  });
}

Bytes encode(const InferInputP1Msg& m) {
  ByteWriter w = start(Step::InferInputP1);
  w.blob(m.block_a);
  w.blob(m.r_a);
  put(w, m.rep);
  put(w, m.com_x_rep);
  return std::move(w).take();
}
InferInputP1Msg decode_infer_input_p1(ByteView body) {
  return parse<InferInputP1Msg>(body, Step::InferInputP1, [](ByteReader& r, InferInputP1Msg& m) {
    m.block_a = r.blob();
    m.r_a = r.blob();
    get(r, m.rep);
    get(r, m.com_x_rep);
  });
}

Bytes encode(const WeightsMsg& m) {
  ByteWriter w = start(Step::WeightsB);
  w.blob(m.block_b);
  w.blob(m.r_b);
  return std::move(w).take();
}
WeightsMsg decode_weights(ByteView body) {
  return parse<WeightsMsg>(body, Step::WeightsB, [](ByteReader& r, WeightsMsg& m) {
    m.block_b = r.blob();
    m.r_b = r.blob();
  });
}

Bytes encode(const InferInputP2Msg& m) {
  ByteWriter w = start(Step::InferInputP2);
  put(w, m.rep);
  put(w, m.x_rep);
  put(w, m.r_x_rep);
  commit::write_record(w, m.com_a);
  return std::move(w).take();
}
InferInputP2Msg decode_infer_input_p2(ByteView body) {
  return parse<InferInputP2Msg>(body, Step::InferInputP2, [](ByteReader& r, InferInputP2Msg& m) {
    get(r, m.rep);
    get(r, m.x_rep);
    get(r, m.r_x_rep);
    m.com_a = commit::read_commitment(r);
  });
}

Bytes encode(const InferOutputP1Msg& m) {
  ByteWriter w = start(Step::InferOutputP1);
  put(w, m.com_act);
  return std::move(w).take();
}
InferOutputP1Msg decode_infer_output_p1(ByteView body) {
  return parse<InferOutputP1Msg>(body, Step::InferOutputP1,
                                 [](ByteReader& r, InferOutputP1Msg& m) { get(r, m.com_act); });
}

Bytes encode(const InferOutputP2Msg& m) {
  ByteWriter w = start(Step::InferOutputP2);
  put(w, m.act);
  put(w, m.r_act);
  put(w, m.com_act);
  return std::move(w).take();
}
InferOutputP2Msg decode_infer_output_p2(ByteView body) {
  return parse<InferOutputP2Msg>(body, Step::InferOutputP2, [](ByteReader& r, InferOutputP2Msg& m) {
    get(r, m.act);
    get(r, m.r_act);
    get(r, m.com_act);
  });
}

Bytes encode(const ActivationsMsg& m) {
  ByteWriter w = start(Step::ActivationsB);
  put(w, m.a_b);
  m.roots.write_to(w);
  return std::move(w).take();
}
ActivationsMsg decode_activations(ByteView body) {
  return parse<ActivationsMsg>(body, Step::ActivationsB, [](ByteReader& r, ActivationsMsg& m) {
    get(r, m.a_b);
    m.roots = audit::TraceCommitment::read_from(r);
  });
}

Bytes encode(Step s, const ChallengeMsg& m) {
  ByteWriter w = start(s);
  m.challenge.write_to(w);
  return std::move(w).take();
}
ChallengeMsg decode_challenge(ByteView body, Step s) {
  return parse<ChallengeMsg>(body, s,
                             [](ByteReader& r, ChallengeMsg& m) { m.challenge = audit::Challenge::read_from(r); });
}

Bytes encode(Step s, const ProofMsg& m) {
  ByteWriter w = start(s);
  m.proof.write_to(w);
  return std::move(w).take();
}
ProofMsg decode_proof(ByteView body, Step s) {
  return parse<ProofMsg>(body, s, [](ByteReader& r, ProofMsg& m) { m.proof = audit::CnczkProof::read_from(r); });
}

Bytes encode(const OutputCommitMsg& m) {
  ByteWriter w = start(Step::OutputCommitC);
  put(w, m.com_pred);
  m.roots.write_to(w);
  w.blob(m.r_c);
  return std::move(w).take();
}
OutputCommitMsg decode_output_commit(ByteView body) {
  return parse<OutputCommitMsg>(body, Step::OutputCommitC, [](ByteReader& r, OutputCommitMsg& m) {
    get(r, m.com_pred);
    m.roots = audit::TraceCommitment::read_from(r);
    m.r_c = r.blob();
  });
}

Bytes encode(const AckMsg& m) {
  ByteWriter w = start(Step::AckC);
  w.str(m.note);
  return std::move(w).take();
}
AckMsg decode_ack(ByteView body) {
  return parse<AckMsg>(body, Step::AckC, [](ByteReader& r, AckMsg& m) { m.note = r.str(); });
}

Bytes encode_public(const SubScorePublicMsg& m) {
  ByteWriter w;
  put(w, m);
  return std::move(w).take();
}

Bytes encode(const SubScoreInputP2Msg& m) {
  ByteWriter w = start(Step::SubScoreInputP2);
  put(w, m.pub);
  put(w, m.features);
  put(w, m.r_features);
  put(w, m.labels);
  put(w, m.r_labels);
  put(w, m.com_pred);
  return std::move(w).take();
}
SubScoreInputP2Msg decode_subscore_p2(ByteView body) {
  return parse<SubScoreInputP2Msg>(body, Step::SubScoreInputP2, [](ByteReader& r, SubScoreInputP2Msg& m) {
    get(r, m.pub);
    get(r, m.features);
    get(r, m.r_features);
    get(r, m.labels);
    get(r, m.r_labels);
    get(r, m.com_pred);
  });
}

Bytes encode(const SubScoreInputP1Msg& m) {
  ByteWriter w = start(Step::SubScoreInputP1);
  put(w, m.pub);
  put(w, m.predictions);
  put(w, m.r_predictions);
  put(w, m.paths);
  put(w, m.com_labels);
  return std::move(w).take();
}
SubScoreInputP1Msg decode_subscore_p1(ByteView body) {
  return parse<SubScoreInputP1Msg>(body, Step::SubScoreInputP1, [](ByteReader& r, SubScoreInputP1Msg& m) {
    get(r, m.pub);
    get(r, m.predictions);
    get(r, m.r_predictions);
    get(r, m.paths);
    get(r, m.com_labels);
  });
}

Bytes encode(Step s, const ScoreMsg& m) {
  ByteWriter w = start(s);
  w.u32_be(static_cast<std::uint32_t>(m.l));
  w.u32_be(static_cast<std::uint32_t>(m.u));
  w.u32_be(static_cast<std::uint32_t>(m.d));
  w.u32_be(static_cast<std::uint32_t>(m.phi));
  w.u64_be(m.k);
  return std::move(w).take();
}
ScoreMsg decode_score(ByteView body, Step s) {
  return parse<ScoreMsg>(body, s, [](ByteReader& r, ScoreMsg& m) {
    m.l = static_cast<std::int32_t>(r.u32_be());
    m.u = static_cast<std::int32_t>(r.u32_be());
    m.d = static_cast<std::int32_t>(r.u32_be());
    m.phi = static_cast<std::int32_t>(r.u32_be());
    m.k = r.u64_be();
  });
}

Bytes encode(const AbortMsg& m) {
  ByteWriter w = start(Step::Abort);
  w.u8(m.stage);
  w.u8(static_cast<std::uint8_t>(m.code));
  w.str(m.reason);
  return std::move(w).take();
}
AbortMsg decode_abort(ByteView body) {
  return parse<AbortMsg>(body, Step::Abort, [](ByteReader& r, AbortMsg& m) {
    m.stage = r.u8();
    std::uint8_t code = r.u8();
    if (code > 2) fail(ErrorCode::Malformed, "unknown abort code");
    m.code = static_cast<AbortCode>(code);
    m.reason = r.str();
  });
}

ScoreMsg to_score_msg(const scoring::ScoreReport& r) {
  return {r.l.raw(), r.u.raw(), r.d.raw(), r.phi.raw(), r.k};
}

scoring::ScoreReport from_score_msg(const ScoreMsg& m) {
  using numerics::FixedScalar;
  scoring::ScoreReport r;
  r.l = FixedScalar::from_raw(m.l);
  r.u = FixedScalar::from_raw(m.u);
  r.d = FixedScalar::from_raw(m.d);
  r.phi = FixedScalar::from_raw(m.phi);
  r.k = static_cast<std::size_t>(m.k);
  return r;
}

numerics::Model architecture_only(const numerics::Model& m) {
  std::vector<numerics::Layer> layers;
  for (const auto& l : m.layers()) {
    std::vector<FixedTensor> zeros;
    for (const auto& p : l.params()) zeros.emplace_back(p.shape());
    layers.emplace_back(l.spec(), std::move(zeros));
  }
  return numerics::Model(m.name(), m.input_shape(), std::move(layers));
}

void validate_challenge(const audit::Challenge& c, std::size_t N, std::size_t L) {
  if (c.points.size() != c.layers.size() || c.points.empty() || c.points.size() > N) {
    fail(ErrorCode::Malformed, "challenge has inconsistent shape");
  }
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    if (c.points[k] >= N || (k > 0 && c.points[k] <= c.points[k - 1])) {
      fail(ErrorCode::Malformed, "challenge points must be ascending and in range");
    }
    const auto& ls = c.layers[k];
    if (ls.empty() || ls.size() > L) fail(ErrorCode::Malformed, "challenge layer set has wrong size");
    for (std::size_t j = 0; j < ls.size(); ++j) {
      if (ls[j] < 1 || ls[j] > L || (j > 0 && ls[j] <= ls[j - 1])) {
        fail(ErrorCode::Malformed, "challenge layers must be ascending within 1..L");
      }
    }
  }
}

Message make_message(Step s, PartyId sender, PartyId receiver, Bytes body) {
  Message m;
  m.kind = s == Step::Abort ? MessageKind::Abort : step_info(s).kind;
  m.sender = sender;
  m.receiver = receiver;
  m.body = std::move(body);
  return m;
}

namespace {

void zero(Bytes& b) { std::fill(b.begin(), b.end(), std::uint8_t{0}); }

void zero(audit::LeafOpening& o) { zero(o.leaf); }

}  // namespace

Bytes redact_revelations(const Message& m) {
  Step s;
  try {
    s = peek_step(m);
  } catch (const Error&) {
    return m.body;
  }
  try {
    if (s == Step::CpProof) {
      CpProofMsg p = decode_cp_proof(m.body);
      for (auto& r : p.responses) {
        zero(r.x_i);
        zero(r.r_i);
        zero(r.x_j);
        zero(r.r_j);
      }
      return encode(p);
    }
    if (s == Step::ProofB || s == Step::ProofC) {
      ProofMsg p = decode_proof(m.body, s);
      for (auto& t : p.proof.transitions) {
        zero(t.before);
        zero(t.after);
        if (t.weights) zero(*t.weights);
      }
      for (auto& in : p.proof.inputs) {
        zero(in.level0);
        zero(in.data);
        zero(in.commitment_randomness);
      }
      return encode(s, p);
    }
  } catch (const Error&) {
  }
  return m.body;
}

}  // namespace privade::protocol
