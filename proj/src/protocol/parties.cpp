#include "privade/protocol/parties.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "privade/audit/cp.hpp"
#include "privade/common/errors.hpp"
#include "privade/numerics/model_io.hpp"
#include "privade/scoring/subscore.hpp"
#include "privade/selection/coin_flip.hpp"
#include "privade/selection/points.hpp"

namespace privade::protocol {

using audit::Variant;
using numerics::FixedScalar;
using numerics::Model;

namespace {

struct AdversaryName {
  Adversary adv;
  const char* name;
  PartyId party;
};

const std::vector<AdversaryName>& adversary_names() {
  constexpr PartyId A = PartyId::Alice, B = PartyId::Bob;
  static const std::vector<AdversaryName> names = {
      {Adversary::AliceWrongThetaA, "alice-wrong-theta-a", A},
      {Adversary::BobWrongXToDealer, "bob-wrong-x-to-dealer", B},
      {Adversary::BobBadRepset, "bob-bad-repset", B},
      {Adversary::BobCpBadOpening, "bob-cp-bad-opening", B},
      {Adversary::BobCpWitnessOutsideRep, "bob-cp-witness-outside-rep", B},
      {Adversary::BobCpMissingResponses, "bob-cp-missing-responses", B},
      {Adversary::BobBadIndices, "bob-bad-indices", B},
      {Adversary::BobTamperedActivations, "bob-tampered-activations", B},
      {Adversary::BobWrongThetaB, "bob-wrong-theta-b", B},
      {Adversary::BobSubstitutedInput, "bob-substituted-input", B},
      {Adversary::BobForgedMerklePath, "bob-forged-merkle-path", B},
      {Adversary::AliceWrongThetaC, "alice-wrong-theta-c", A},
      {Adversary::AliceCorruptCLayer, "alice-corrupt-c-layer", A},
      {Adversary::AliceWrongCInput, "alice-wrong-c-input", A},
      {Adversary::AliceOutputMismatch, "alice-output-mismatch", A},
      {Adversary::AliceBadSubscoreOpening, "alice-bad-subscore-opening", A},
      {Adversary::BobPermutedLabels, "bob-permuted-labels", B},
      {Adversary::BobAlteredFeaturesSubscore, "bob-altered-features-subscore", B},
      {Adversary::ReplayedMessage, "replayed-message", B},
      {Adversary::EarlyTerminationBob, "early-termination-bob", B},
  };
  return names;
}

std::int32_t nudge(std::int32_t v, std::int32_t by) {
  if (v > std::numeric_limits<std::int32_t>::max() - by) return v - by;
  return v + by;
}

// One raw LSB added to the first element.
FixedTensor bump(FixedTensor t) {
  if (!t.empty()) t.raw()[0] = nudge(t.raw()[0], 1);
  return t;
}

// Adds 1.0 to the first entry of the last parameter tensor (bias or shift) of
// the first parametric layer. Returns false when the block has no parameters.
bool perturb_weights(const Model& m, Model& out) {
  std::vector<numerics::Layer> layers = m.layers();
  for (auto& l : layers) {
    if (l.params().empty()) continue;
    std::vector<FixedTensor> ps = l.params();
    ps.back().raw()[0] = nudge(ps.back().raw()[0], 1 << 16);
    l = numerics::Layer(l.spec(), std::move(ps));
    out = Model(m.name(), m.input_shape(), std::move(layers));
    return true;
  }
  return false;
}

commit::Opened commit_weights(const commit::CommitParams& pp, const Model& block, Drbg& rng) {
  return commit::commit(pp, view(audit::weight_tree(block).root().digest), rng);
}

bool opens_weights(const commit::CommitParams& pp, const commit::Commitment& com, const Model& block,
                   ByteView randomness) {
  return commit::open(pp, com, view(audit::weight_tree(block).root().digest), randomness);
}

std::vector<std::uint64_t> to_u64(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }
std::vector<std::size_t> to_size(const std::vector<std::uint64_t>& v) { return {v.begin(), v.end()}; }

// Distinct, in range, expected length.
bool valid_indices(const std::vector<std::uint64_t>& v, std::size_t n, std::size_t expected) {
  if (v.size() != expected) return false;
  std::vector<std::uint64_t> s = v;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
  return s.empty() || s.back() < n;
}

std::string audit_failure(const char* block, const audit::CnczkVerdict& v) {
  std::string where;
  if (v.failure) {
    where = " at point " + std::to_string(v.failure->first) + " layer " + std::to_string(v.failure->second);
  }
  return std::string("block ") + block + " audit rejected" + where + ": " + v.reason;
}

// ---------------------------------------------------------------- P1

class Alice final : public Actor {
 public:
  Alice(const split::SplitModel& model, const RunConfig& cfg, Adversary adv)
      : model_(model), cfg_(cfg), pp_(commit::setup_com(cfg.security_level)),
        rng_(Drbg(cfg.seed).fork("alice")), adv_(adv) {}

  PartyId id() const override { return PartyId::Alice; }

  std::vector<Message> start() override {
    com_a_ = commit_weights(pp_, model_.a, rng_);
    com_b_ = commit_weights(pp_, model_.b, rng_);
    com_c_ = commit_weights(pp_, model_.c, rng_);
    coin_ = selection::make_coin_share(pp_, rng_);
    ModelCommitMsg m{com_a_.com, com_b_.com, com_c_.com, coin_.opening.com,
                     numerics::encode_model(architecture_only(model_.c))};
    expect({Step::DataCommit});
    return {send(Step::ModelCommit, PartyId::Bob, encode(m))};
  }

 protected:
  std::vector<Message> handle(Step step, const Message& msg) override {
    switch (step) {
      case Step::DataCommit: return on_data_commit(msg);
      case Step::CoinRevealB: return on_coin(msg);
      case Step::RepIndices: return on_indices(msg);
      case Step::CpProof: return on_cp_proof(msg);
      case Step::InferOutputP1: return on_inference(msg);
      case Step::ActivationsB: return on_activations(msg);
      case Step::ProofB: return on_proof_b(msg);
      case Step::ChallengeC: return on_challenge_c(msg);
      case Step::AckC: return on_ack(msg);
      case Step::ScoreP1: {
        finish(from_score_msg(decode_score(msg.body, Step::ScoreP1)));
        return {};
      }
      default: return abort(std::string("no handler for ") + to_string(step));
    }
  }

 private:
  std::vector<Message> on_data_commit(const Message& msg) {
    data_ = decode_data_commit(msg.body);
    n_ = data_.com_x.size();
    if (data_.com_y.size() != n_) return abort("feature and label commitment counts differ");
    if (cfg_.k > n_) return abort("k exceeds the committed data set size");
    expect({Step::CoinRevealB});
    return {send(Step::CoinRevealA, PartyId::Bob,
                 encode(Step::CoinRevealA, CoinRevealMsg{coin_.contribution, coin_.opening.randomness}))};
  }

  std::vector<Message> on_coin(const Message& msg) {
    CoinRevealMsg r = decode_coin_reveal(msg.body, Step::CoinRevealB);
    seed_ = selection::coin_flip_seed(pp_, coin_.opening.com, coin_.contribution, coin_.opening.randomness,
                                      data_.coin, r.contribution, r.randomness);
    passed("P1:coin-flip");
    stage_ = 1;
    expect({Step::RepIndices});
    return {};
  }

  std::vector<Message> on_indices(const Message& msg) {
    IndicesMsg m = decode_indices(msg.body);
    if (!valid_indices(m.rep, n_, cfg_.k)) return abort("representative indices are not k distinct in-range points");
    rep_ = to_size(m.rep);
    cp_challenge_ = audit::cp_challenge(rng_, n_, cfg_.challenges_for(n_));
    expect({Step::CpProof});
    return {send(Step::CpChallenge, PartyId::Bob, encode(CpChallengeMsg{to_u64(cp_challenge_)}))};
  }

  std::vector<Message> on_cp_proof(const Message& msg) {
    CpProofMsg m = decode_cp_proof(msg.body);
    audit::CpVerdict v =
        audit::cp_verify(pp_, data_.com_x, rep_, cfg_.d, cfg_.delta, cp_challenge_, m.responses);
    if (!v.accepted) {
      return abort("representativeness proof rejected: " + std::to_string(v.successes) + " of " +
                   std::to_string(v.required) + " required successes");
    }
    passed("P1:cp");
    stage_ = 2;
    Model a = model_.a;
    if (adv_ == Adversary::AliceWrongThetaA) perturb_weights(model_.a, a);
    InferInputP1Msg in{numerics::encode_model(a), com_a_.randomness, to_u64(rep_), {}};
    for (std::size_t i : rep_) in.com_x_rep.push_back(data_.com_x[i]);
    WeightsMsg w{numerics::encode_model(model_.b), com_b_.randomness};
    expect({Step::InferOutputP1});
    return {send(Step::InferInputP1, PartyId::Dealer, encode(in)), send(Step::WeightsB, PartyId::Bob, encode(w))};
  }

  std::vector<Message> on_inference(const Message& msg) {
    InferOutputP1Msg m = decode_infer_output_p1(msg.body);
    if (m.com_act.size() != rep_.size()) return abort("dealer returned the wrong number of commitments");
    com_act_ = std::move(m.com_act);
    expect({Step::ActivationsB});
    return {};
  }

  std::vector<Message> on_activations(const Message& msg) {
    act_b_ = decode_activations(msg.body);
    if (act_b_.a_b.size() != rep_.size()) return abort("wrong number of block B outputs");
    audit::AuditPlan plan = cfg_.audit_b.resolve(rep_.size(), model_.b.size());
    challenge_b_ = audit::cnczk_challenge(rng_, plan.N, plan.L, plan.m, plan.s);
    expect({Step::ProofB});
    return {send(Step::ChallengeB, PartyId::Bob, encode(Step::ChallengeB, ChallengeMsg{challenge_b_}))};
  }

  std::vector<Message> on_proof_b(const Message& msg) {
    ProofMsg m = decode_proof(msg.body, Step::ProofB);
    audit::VerifierView view = audit::verifier_view(model_.b, Variant::HiddenData, rep_.size());
    view.public_outputs = &act_b_.a_b;
    view.input_commitments = &com_act_;
    audit::CnczkVerdict v = audit::cnczk_verify(pp_, act_b_.roots, challenge_b_, m.proof, view);
    if (!v.accepted) return abort(audit_failure("B", v));
    passed("P1:cnczk-b");

    std::vector<FixedTensor> inputs = act_b_.a_b;
    if (adv_ == Adversary::AliceWrongCInput) inputs[0] = bump(inputs[0]);
    if (adv_ == Adversary::AliceWrongThetaC) {
      Model wrong = model_.c;
      perturb_weights(model_.c, wrong);
      trace_c_ = audit::cnczk_commit_given_trace(model_.c, split::full_trace(wrong, inputs), Variant::HiddenWeights);
    } else if (adv_ == Adversary::AliceCorruptCLayer) {
      split::ForwardTrace tr = split::full_trace(model_.c, inputs);
      std::size_t level = model_.c.size() / 2 + 1;
      tr.levels[level][0] = bump(tr.levels[level][0]);
      for (std::size_t l = level; l < model_.c.size(); ++l) {
        tr.levels[l + 1][0] = model_.c.layer(l).forward(tr.levels[l][0]);
      }
      trace_c_ = audit::cnczk_commit_given_trace(model_.c, std::move(tr), Variant::HiddenWeights);
    } else {
      trace_c_ = audit::cnczk_commit_trace(model_.c, inputs, Variant::HiddenWeights);
    }
    predictions_ = trace_c_.trace.levels.back();
    if (adv_ == Adversary::AliceOutputMismatch) predictions_[0] = bump(predictions_[0]);

    OutputCommitMsg out{{}, trace_c_.pub, com_c_.randomness};
    for (const auto& y : predictions_) {
      pred_open_.push_back(commit::commit(pp_, audit::activation_leaf(y), rng_));
      out.com_pred.push_back(pred_open_.back().com);
    }
    expect({Step::ChallengeC});
    return {send(Step::OutputCommitC, PartyId::Bob, encode(out))};
  }

  std::vector<Message> on_challenge_c(const Message& msg) {
    ChallengeMsg m = decode_challenge(msg.body, Step::ChallengeC);
    validate_challenge(m.challenge, rep_.size(), model_.c.size());
    ProofMsg p{audit::cnczk_prove(trace_c_, m.challenge)};
    expect({Step::AckC});
    return {send(Step::ProofC, PartyId::Bob, encode(Step::ProofC, p))};
  }

  std::vector<Message> on_ack(const Message& msg) {
    decode_ack(msg.body);
    stage_ = 3;
    SubScoreInputP1Msg in;
    in.pub = {data_.com_x, to_u64(rep_), trace_c_.pub.levels.back(), Bytes{}};
    std::string cfg = cfg_.scoring.to_json().dump();
    in.pub.scoring_config.assign(cfg.begin(), cfg.end());
    in.predictions = predictions_;
    for (std::size_t j = 0; j < rep_.size(); ++j) {
      in.r_predictions.push_back(pred_open_[j].randomness);
      in.paths.push_back(commit::mt_open(trace_c_.level_trees.back(), j));
      in.com_labels.push_back(data_.com_y[rep_[j]]);
    }
    if (adv_ == Adversary::AliceBadSubscoreOpening) in.r_predictions[0][0] ^= 0x01;
    expect({Step::ScoreP1});
    return {send(Step::SubScoreInputP1, PartyId::Dealer, encode(in))};
  }

  split::SplitModel model_;
  RunConfig cfg_;
  commit::CommitParams pp_;
  Drbg rng_;
  Adversary adv_;

  commit::Opened com_a_, com_b_, com_c_;
  selection::CoinShare coin_;
  DataCommitMsg data_;
  std::size_t n_ = 0;
  Digest seed_{};
  std::vector<std::size_t> rep_;
  std::vector<std::size_t> cp_challenge_;
  std::vector<Commitment> com_act_;
  ActivationsMsg act_b_;
  audit::Challenge challenge_b_;
  audit::CommittedTrace trace_c_;
  std::vector<FixedTensor> predictions_;
  std::vector<commit::Opened> pred_open_;
};

// ---------------------------------------------------------------- P2

class Bob final : public Actor {
 public:
  Bob(const selection::Dataset& data, const RunConfig& cfg, Adversary adv)
      : data_(data), cfg_(cfg), pp_(commit::setup_com(cfg.security_level)), rng_(Drbg(cfg.seed).fork("bob")),
        adv_(adv) {
    expect({Step::ModelCommit});
  }

  PartyId id() const override { return PartyId::Bob; }

 protected:
  std::vector<Message> handle(Step step, const Message& msg) override {
    switch (step) {
      case Step::ModelCommit: return on_model_commit(msg);
      case Step::CoinRevealA: return on_coin(msg);
      case Step::CpChallenge: return on_cp_challenge(msg);
      case Step::WeightsB: return on_weights(msg);
      case Step::InferOutputP2: return on_inference(msg);
      case Step::ChallengeB: return on_challenge_b(msg);
      case Step::OutputCommitC: return on_output_commit(msg);
      case Step::ProofC: return on_proof_c(msg);
      case Step::ScoreP2: {
        finish(from_score_msg(decode_score(msg.body, Step::ScoreP2)));
        return {};
      }
      default: return abort(std::string("no handler for ") + to_string(step));
    }
  }

 private:
  std::vector<Message> on_model_commit(const Message& msg) {
    mc_ = decode_model_commit(msg.body);
    arch_c_ = numerics::decode_model(mc_.arch_c);
    DataCommitMsg out;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      auto ox = commit::commit(pp_, data_.xs[i].serialize(), rng_);
      out.com_x.push_back(ox.com);
      r_x_.push_back(std::move(ox.randomness));
      auto oy = commit::commit(pp_, data_.ys[i].serialize(), rng_);
      out.com_y.push_back(oy.com);
      r_y_.push_back(std::move(oy.randomness));
    }
    com_x_ = out.com_x;
    coin_ = selection::make_coin_share(pp_, rng_);
    out.coin = coin_.opening.com;
    expect({Step::CoinRevealA});
    return {send(Step::DataCommit, PartyId::Alice, encode(out))};
  }

  std::vector<Message> on_coin(const Message& msg) {
    CoinRevealMsg r = decode_coin_reveal(msg.body, Step::CoinRevealA);
    Digest seed = selection::coin_flip_seed(pp_, mc_.coin, r.contribution, r.randomness, coin_.opening.com,
                                            coin_.contribution, coin_.opening.randomness);
    passed("P2:coin-flip");
    std::vector<Message> out = {send(Step::CoinRevealB, PartyId::Alice,
                                     encode(Step::CoinRevealB,
                                            CoinRevealMsg{coin_.contribution, coin_.opening.randomness}))};
    stage_ = 1;
    const std::size_t n = data_.size();
    if (adv_ == Adversary::BobBadRepset) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::vector<u128> dist(n);
      for (std::size_t i = 0; i < n; ++i) dist[i] = audit::sq_distance(data_.xs[0], data_.xs[i]);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
      rep_.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(cfg_.k, n)));
    } else {
      rep_ = selection::select_representatives(data_.xs, cfg_.k, cfg_.projection_dim, seed);
      if (n > rep_.k()) {
        FixedScalar dprime =
            selection::percentile_distance(selection::PointSet::from_tensors(data_.xs), rep_, cfg_.delta);
        if (dprime >= cfg_.d) {
          auto a = abort("d' = " + numerics::to_decimal(dprime) + " is not below d = " + numerics::to_decimal(cfg_.d),
                         AbortCode::Voluntary);
          out.insert(out.end(), a.begin(), a.end());
          return out;
        }
      }
      passed("P2:d-prime");
    }
    IndicesMsg m{to_u64(rep_.indices)};
    if (adv_ == Adversary::BobBadIndices) {
      if (m.rep.size() >= 2) m.rep[1] = m.rep[0];
      else m.rep[0] = n;
    }
    indices_msg_ = send(Step::RepIndices, PartyId::Alice, encode(m));
    out.push_back(indices_msg_);
    expect({Step::CpChallenge});
    return out;
  }

  std::vector<Message> on_cp_challenge(const Message& msg) {
    CpChallengeMsg m = decode_cp_challenge(msg.body);
    const std::size_t n = data_.size();
    if (!valid_indices(m.indices, n, m.indices.size()) || m.indices.empty()) {
      return abort("CP challenge indices are invalid");
    }
    if (adv_ == Adversary::EarlyTerminationBob) {
      withdraw();
      return {};
    }
    if (adv_ == Adversary::ReplayedMessage) {
      expect({});
      return {indices_msg_};
    }
    std::vector<std::size_t> challenge = to_size(m.indices);
    CpProofMsg p{audit::cp_respond({&data_.xs, &r_x_}, rep_, cfg_.d, challenge)};
    std::set<std::size_t> in_rep(rep_.indices.begin(), rep_.indices.end());
    auto open_pair = [&](audit::CpResponse& r, std::size_t j) {
      r.failed = false;
      r.witness = j;
      r.x_i = data_.xs[r.index].serialize();
      r.r_i = r_x_[r.index];
      r.x_j = data_.xs[j].serialize();
      r.r_j = r_x_[j];
    };
    switch (adv_) {
      case Adversary::BobCpBadOpening: {
        auto& r = p.responses.front();
        if (r.failed) open_pair(r, rep_.indices.front());
        r.r_i[0] ^= 0x01;
        break;
      }
      case Adversary::BobCpWitnessOutsideRep: {
        std::size_t outsider = 0;
        while (outsider < n && in_rep.count(outsider)) ++outsider;
        for (auto& r : p.responses) {
          std::size_t i = static_cast<std::size_t>(r.index);
          open_pair(r, in_rep.count(i) ? outsider : i);
        }
        break;
      }
      case Adversary::BobCpMissingResponses: p.responses.pop_back(); break;
      default: break;
    }
    expect({Step::WeightsB});
    return {send(Step::CpProof, PartyId::Alice, encode(p))};
  }

  std::vector<Message> on_weights(const Message& msg) {
    WeightsMsg w = decode_weights(msg.body);
    theta_b_ = numerics::decode_model(w.block_b);
    if (!opens_weights(pp_, mc_.com_b, theta_b_, w.r_b)) return abort("block B weights do not open com_B");
    passed("P2:weights-b");
    stage_ = 2;
    InferInputP2Msg in{to_u64(rep_.indices), {}, {}, mc_.com_a};
    for (std::size_t i : rep_.indices) {
      in.x_rep.push_back(data_.xs[i]);
      in.r_x_rep.push_back(r_x_[i]);
    }
    if (adv_ == Adversary::BobWrongXToDealer) in.x_rep[0] = bump(in.x_rep[0]);
    expect({Step::InferOutputP2});
    return {send(Step::InferInputP2, PartyId::Dealer, encode(in))};
  }

  std::vector<Message> on_inference(const Message& msg) {
    act_ = decode_infer_output_p2(msg.body);
    const std::size_t k = rep_.k();
    if (act_.act.size() != k || act_.r_act.size() != k || act_.com_act.size() != k) {
      return abort("dealer output has the wrong arity");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (!commit::open(pp_, act_.com_act[j], audit::activation_leaf(act_.act[j]), act_.r_act[j])) {
        return abort("dealer activation " + std::to_string(j) + " does not open its commitment");
      }
    }
    std::vector<FixedTensor> inputs = act_.act;
    if (adv_ == Adversary::BobSubstitutedInput) inputs[0] = bump(inputs[0]);
    Model wrong;
    if (adv_ == Adversary::BobWrongThetaB && perturb_weights(theta_b_, wrong)) {
      trace_b_ = audit::cnczk_commit_given_trace(theta_b_, split::full_trace(wrong, inputs), Variant::HiddenData);
    } else if (adv_ == Adversary::BobWrongThetaB) {
      split::ForwardTrace tr = split::full_trace(theta_b_, inputs);
      tr.levels[1][0] = bump(tr.levels[1][0]);
      for (std::size_t l = 1; l < theta_b_.size(); ++l) tr.levels[l + 1][0] = theta_b_.layer(l).forward(tr.levels[l][0]);
      trace_b_ = audit::cnczk_commit_given_trace(theta_b_, std::move(tr), Variant::HiddenData);
    } else {
      trace_b_ = audit::cnczk_commit_trace(theta_b_, inputs, Variant::HiddenData);
    }
    a_b_ = trace_b_.trace.levels.back();
    if (adv_ == Adversary::BobTamperedActivations) a_b_[0] = bump(a_b_[0]);
    expect({Step::ChallengeB});
    return {send(Step::ActivationsB, PartyId::Alice, encode(ActivationsMsg{a_b_, trace_b_.pub}))};
  }

  std::vector<Message> on_challenge_b(const Message& msg) {
    ChallengeMsg m = decode_challenge(msg.body, Step::ChallengeB);
    validate_challenge(m.challenge, rep_.k(), theta_b_.size());
    ProofMsg p{audit::cnczk_prove(trace_b_, m.challenge, &act_.r_act)};
    if (adv_ == Adversary::BobForgedMerklePath && !p.proof.transitions.empty()) {
      p.proof.transitions.front().after.path.steps.front().sibling[0] ^= 0x01;
    }
    expect({Step::OutputCommitC});
    return {send(Step::ProofB, PartyId::Alice, encode(Step::ProofB, p))};
  }

  std::vector<Message> on_output_commit(const Message& msg) {
    oc_ = decode_output_commit(msg.body);
    if (oc_.com_pred.size() != rep_.k()) return abort("wrong number of prediction commitments");
    audit::AuditPlan plan = cfg_.audit_c.resolve(rep_.k(), arch_c_.size());
    challenge_c_ = audit::cnczk_challenge(rng_, plan.N, plan.L, plan.m, plan.s);
    expect({Step::ProofC});
    return {send(Step::ChallengeC, PartyId::Alice, encode(Step::ChallengeC, ChallengeMsg{challenge_c_}))};
  }

  std::vector<Message> on_proof_c(const Message& msg) {
    ProofMsg m = decode_proof(msg.body, Step::ProofC);
    audit::VerifierView view = audit::verifier_view(arch_c_, Variant::HiddenWeights, rep_.k());
    view.public_inputs = &a_b_;
    view.weights_commitment = mc_.com_c;
    view.weights_commitment_randomness = oc_.r_c;
    audit::CnczkVerdict v = audit::cnczk_verify(pp_, oc_.roots, challenge_c_, m.proof, view);
    if (!v.accepted) return abort(audit_failure("C", v));
    passed("P2:cnczk-c");
    stage_ = 3;

    SubScoreInputP2Msg in;
    in.pub = {com_x_, to_u64(rep_.indices), oc_.roots.levels.back(), Bytes{}};
    std::string cfg = cfg_.scoring.to_json().dump();
    in.pub.scoring_config.assign(cfg.begin(), cfg.end());
    in.features = data_.xs;
    in.r_features = r_x_;
    for (std::size_t i : rep_.indices) {
      in.labels.push_back(data_.ys[i]);
      in.r_labels.push_back(r_y_[i]);
    }
    in.com_pred = oc_.com_pred;
    if (adv_ == Adversary::BobPermutedLabels && in.labels.size() >= 2) {
      std::swap(in.labels[0], in.labels[1]);
      std::swap(in.r_labels[0], in.r_labels[1]);
    }
    if (adv_ == Adversary::BobAlteredFeaturesSubscore) in.features[0] = bump(in.features[0]);
    expect({Step::ScoreP2});
    return {send(Step::AckC, PartyId::Alice, encode(AckMsg{"block C accepted"})),
            send(Step::SubScoreInputP2, PartyId::Dealer, encode(in))};
  }

  const selection::Dataset& data_;
  RunConfig cfg_;
  commit::CommitParams pp_;
  Drbg rng_;
  Adversary adv_;

  ModelCommitMsg mc_;
  Model arch_c_;
  std::vector<Commitment> com_x_;
  std::vector<Bytes> r_x_, r_y_;
  selection::CoinShare coin_;
  selection::RepresentativeSet rep_;
  Message indices_msg_;
  Model theta_b_;
  InferOutputP2Msg act_;
  audit::CommittedTrace trace_b_;
  std::vector<FixedTensor> a_b_;
  OutputCommitMsg oc_;
  audit::Challenge challenge_c_;
};

// ---------------------------------------------------------------- dealer

class Dealer final : public Actor {
 public:
  explicit Dealer(const RunConfig& cfg)
      : cfg_(cfg), pp_(commit::setup_com(cfg.security_level)), rng_(Drbg(cfg.seed).fork("dealer")) {
    expect({Step::InferInputP1, Step::InferInputP2});
    stage_ = 2;
  }

  PartyId id() const override { return PartyId::Dealer; }

 protected:
  std::vector<Message> handle(Step step, const Message& msg) override {
    switch (step) {
      case Step::InferInputP1: in1_ = decode_infer_input_p1(msg.body); break;
      case Step::InferInputP2: in2_ = decode_infer_input_p2(msg.body); break;
      case Step::SubScoreInputP1: sub1_ = decode_subscore_p1(msg.body); break;
      case Step::SubScoreInputP2: sub2_ = decode_subscore_p2(msg.body); break;
      default: return abort(std::string("no handler for ") + to_string(step));
    }
    if (in1_ && in2_ && stage_ == 2) return inference();
    if (sub1_ && sub2_ && stage_ == 3) return subscore();
    return {};
  }

 private:
  std::vector<Message> inference() {
    const InferInputP1Msg& p1 = *in1_;
    const InferInputP2Msg& p2 = *in2_;
    const std::size_t k = p1.rep.size();
    if (p1.rep != p2.rep || p1.com_x_rep.size() != k || p2.x_rep.size() != k || p2.r_x_rep.size() != k) {
      return abort("inference inputs disagree on the representative set");
    }
    Model a = numerics::decode_model(p1.block_a);
    if (!opens_weights(pp_, p2.com_a, a, p1.r_a)) return abort("P1's block A weights do not open com_A");
    for (std::size_t j = 0; j < k; ++j) {
      if (!commit::open(pp_, p1.com_x_rep[j], p2.x_rep[j].serialize(), p2.r_x_rep[j])) {
        return abort("P2's input " + std::to_string(p2.rep[j]) + " does not open com_x");
      }
    }
    InferOutputP1Msg o1;
    InferOutputP2Msg o2;
    for (std::size_t j = 0; j < k; ++j) {
      FixedTensor act = a.forward(p2.x_rep[j]);
      commit::Opened op = commit::commit(pp_, audit::activation_leaf(act), rng_);
      o1.com_act.push_back(op.com);
      o2.com_act.push_back(op.com);
      o2.act.push_back(std::move(act));
      o2.r_act.push_back(std::move(op.randomness));
    }
    passed("dealer:inference");
    stage_ = 3;
    expect({Step::SubScoreInputP1, Step::SubScoreInputP2});
    return {send(Step::InferOutputP1, PartyId::Alice, encode(o1)),
            send(Step::InferOutputP2, PartyId::Bob, encode(o2))};
  }

  std::vector<Message> subscore() {
    const SubScoreInputP1Msg& p1 = *sub1_;
    const SubScoreInputP2Msg& p2 = *sub2_;
    if (encode_public(p1.pub) != encode_public(p2.pub)) return abort("SubScore public inputs disagree");
    std::string cfg(p2.pub.scoring_config.begin(), p2.pub.scoring_config.end());
    if (cfg != cfg_.scoring.to_json().dump()) return abort("SubScore scoring configuration differs from the run's");

    scoring::SubScorePublic pub{pp_, p2.pub.com_x, to_size(p2.pub.rep), p2.pub.output_root, cfg_.scoring};
    scoring::SubScoreModelOwner mo{p1.predictions, p1.r_predictions, p1.paths, p1.com_labels};
    scoring::SubScoreDataOwner dof{p2.features, p2.r_features, p2.labels, p2.r_labels, p2.com_pred};
    scoring::SubScoreResult r = scoring::f_subscore(mo, dof, pub);
    if (!r.report) return abort("SubScore: " + r.abort_reason);
    passed("dealer:subscore");
    finish(*r.report);
    ScoreMsg s = to_score_msg(*r.report);
    return {send(Step::ScoreP1, PartyId::Alice, encode(Step::ScoreP1, s)),
            send(Step::ScoreP2, PartyId::Bob, encode(Step::ScoreP2, s))};
  }

  RunConfig cfg_;
  commit::CommitParams pp_;
  Drbg rng_;
  std::optional<InferInputP1Msg> in1_;
  std::optional<InferInputP2Msg> in2_;
  std::optional<SubScoreInputP1Msg> sub1_;
  std::optional<SubScoreInputP2Msg> sub2_;
};

}  // namespace

const char* to_string(Adversary a) {
  if (a == Adversary::None) return "none";
  for (const auto& n : adversary_names()) {
    if (n.adv == a) return n.name;
  }
  return "?";
}

const std::vector<Adversary>& adversary_catalogue() {
  static const std::vector<Adversary> all = [] {
    std::vector<Adversary> v;
    for (const auto& n : adversary_names()) v.push_back(n.adv);
    return v;
  }();
  return all;
}

Adversary parse_adversary(const std::string& name) {
  if (name.empty() || name == "none") return Adversary::None;
  for (const auto& n : adversary_names()) {
    if (name == n.name) return n.adv;
  }
  fail(ErrorCode::InvalidConfig, "unknown adversary '" + name + "'");
}

PartyId adversary_party(Adversary a) {
  for (const auto& n : adversary_names()) {
    if (n.adv == a) return n.party;
  }
  return PartyId::Hub;
}

std::vector<Message> Actor::receive(const Message& m) {
  if (finished()) return {};
  if (m.receiver != id()) return abort("frame addressed to another party");
  if (m.seq != 0 && m.seq <= last_seq_) return abort("replayed or reordered frame (seq " + std::to_string(m.seq) + ")");
  last_seq_ = std::max(last_seq_, m.seq);
  Step step;
  try {
    step = peek_step(m);
  } catch (const Error& e) {
    return abort(e.what());
  }
  if (step == Step::Abort) {
    outcome_.aborted = true;
    outcome_.stage = stage_;
    try {
      AbortMsg a = decode_abort(m.body);
      outcome_.stage = a.stage;
      outcome_.code = a.code;
      outcome_.reason = std::string(to_string(m.sender)) + " aborted: " + a.reason;
    } catch (const Error&) {
      outcome_.reason = std::string(to_string(m.sender)) + " sent a malformed abort";
    }
    return {};
  }
  const StepInfo& info = step_info(step);
  if (!expected_.count(step) || info.sender != m.sender || info.kind != m.kind) {
    return abort(std::string("unexpected ") + to_string(step) + " from " + to_string(m.sender));
  }
  expected_.erase(step);
  try {
    return handle(step, m);
  } catch (const Error& e) {
    return abort(std::string(to_string(step)) + ": " + e.what());
  }
}

std::vector<Message> Actor::timeout() {
  // The dealer only answers; silence is reported by the parties waiting on it.
  if (finished() || id() == PartyId::Dealer) return {};
  return abort("timeout: no message within the deadline", AbortCode::Timeout);
}

std::vector<Message> Actor::abort(std::string reason, AbortCode code) {
  outcome_.aborted = true;
  outcome_.originated = true;
  outcome_.stage = stage_;
  outcome_.code = code;
  outcome_.reason = reason;
  AbortMsg a{static_cast<std::uint8_t>(stage_), code, std::move(reason)};
  Bytes body = encode(a);
  std::vector<Message> out;
  for (PartyId p : {PartyId::Alice, PartyId::Bob, PartyId::Dealer}) {
    if (p != id()) out.push_back(send(Step::Abort, p, body));
  }
  return out;
}

void Actor::finish(const scoring::ScoreReport& r) {
  outcome_.done = true;
  outcome_.report = r;
}

split::SplitModel prepare_split(const AliceInput& in, const RunConfig& config) {
  std::size_t cut = in.cut_bc;
  if (cut == 0) {
    if (!in.model.split) fail(ErrorCode::InvalidCut, "model carries no split and no cut was given");
    cut = in.model.split->cut_bc;
  }
  Bytes mixer_seed = Drbg(config.seed).fork("mixer").bytes(32);
  return split::split_model(in.model, cut, mixer_seed);
}

std::unique_ptr<Actor> make_alice(const split::SplitModel& model, const RunConfig& config, Adversary adv) {
  return std::make_unique<Alice>(model, config, adv);
}

std::unique_ptr<Actor> make_bob(const selection::Dataset& data, const RunConfig& config, Adversary adv) {
  return std::make_unique<Bob>(data, config, adv);
}

std::unique_ptr<Actor> make_dealer(const RunConfig& config) { return std::make_unique<Dealer>(config); }

}  // namespace privade::protocol
