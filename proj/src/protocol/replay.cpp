#include "privade/protocol/replay.hpp"

#include <algorithm>

#include "privade/audit/cnczk.hpp"
#include "privade/audit/cp.hpp"
#include "privade/common/errors.hpp"
#include "privade/numerics/model_io.hpp"
#include "privade/protocol/payloads.hpp"
#include "privade/selection/coin_flip.hpp"

namespace privade::protocol {

using audit::Variant;

nlohmann::json ReplayVerdict::to_json() const {
  nlohmann::json j = {{"consistent", consistent}, {"frames_checked", frames_checked}, {"completed", completed}};
  if (violation_seq) j["violation_seq"] = *violation_seq;
  if (!reason.empty()) j["reason"] = reason;
  if (abort_seq) {
    j["abort_seq"] = *abort_seq;
    j["abort_code"] = to_string(abort_code);
  }
  if (deviation_seq) {
    j["deviation_seq"] = *deviation_seq;
    j["deviation"] = deviation;
  }
  j["evidence"] = evidence_verdict(*this);
  if (auto seq = evidence_seq(*this)) j["evidence_seq"] = *seq;
  return j;
}

const char* evidence_verdict(const ReplayVerdict& v) {
  if (!v.consistent || v.deviation_seq) return "violation";
  if (v.abort_seq) {
    switch (v.abort_code) {
      case AbortCode::Violation: return "violation";
      case AbortCode::Voluntary: return "voluntary";
      case AbortCode::Timeout: return "timeout";
    }
  }
  return v.completed ? "completed" : "incomplete";
}

std::optional<std::uint64_t> evidence_seq(const ReplayVerdict& v) {
  if (v.violation_seq) return v.violation_seq;
  if (v.deviation_seq) return v.deviation_seq;
  return v.abort_seq;
}

namespace {

const std::vector<Step>& public_steps() {
  static const std::vector<Step> steps = {
      Step::ModelCommit, Step::DataCommit,   Step::CoinRevealA,   Step::CoinRevealB, Step::RepIndices,
      Step::CpChallenge, Step::CpProof,      Step::WeightsB,      Step::InferOutputP1, Step::ActivationsB,
      Step::ChallengeB,  Step::ProofB,       Step::OutputCommitC, Step::ChallengeC,  Step::ProofC,
      Step::AckC,        Step::ScoreP1,
  };
  return steps;
}

struct Violation {
  std::string reason;
};

class Replayer {
 public:
  explicit Replayer(const RunConfig& cfg) : cfg_(cfg), pp_(commit::setup_com(cfg.security_level)) {}

  ReplayVerdict run(const Transcript& t) {
    ReplayVerdict v;
    std::uint64_t last_seq = 0;
    std::size_t next = 0;
    for (const Message& m : t.frames) {
      ++v.frames_checked;
      auto violation = [&](std::string why) {
        v.consistent = false;
        v.violation_seq = m.seq;
        v.reason = std::move(why);
        return v;
      };
      if (m.seq <= last_seq) return violation("sequence number does not increase");
      last_seq = m.seq;
      Step step;
      try {
        step = peek_step(m);
      } catch (const Error& e) {
        return violation(e.what());
      }
      if (step == Step::Abort) {
        AbortMsg a;
        try {
          a = decode_abort(m.body);
        } catch (const Error& e) {
          return violation(e.what());
        }
        if (m.kind != MessageKind::Abort) return violation("abort body in a non-abort frame");
        if (!v.abort_seq) {
          v.abort_seq = m.seq;
          v.abort_code = a.code;
          if (pending_) {
            v.deviation_seq = pending_->seq;
            v.deviation = pending_->reason;
          }
        }
        pending_.reset();
        continue;
      }
      if (pending_) {
        return unanswered(v, *pending_, " but the verifier did not abort");
      }
      if (v.abort_seq) return violation(std::string(to_string(step)) + " after an abort");
      if (next >= public_steps().size() || public_steps()[next] != step) {
        return violation(std::string("out-of-order ") + to_string(step));
      }
      ++next;
      const StepInfo& info = step_info(step);
      if (m.kind != info.kind || m.sender != info.sender || m.receiver != info.receiver) {
        return violation(std::string(to_string(step)) + " has the wrong kind or endpoints");
      }
      try {
        check(step, m);
      } catch (const Violation& bad) {
        pending_ = Pending{m.seq, bad.reason};
      } catch (const Error& e) {
        pending_ = Pending{m.seq, std::string(to_string(step)) + " is malformed: " + e.what()};
      }
      if (step == Step::ScoreP1) v.completed = true;
    }
    if (pending_) {
      return unanswered(v, *pending_, " but the transcript ends without an abort");
    }
    v.consistent = true;
    return v;
  }

 private:
  struct Pending {
    std::uint64_t seq;
    std::string reason;
  };

  [[noreturn]] static void bad(std::string why) { throw Violation{std::move(why)}; }

  // A failed check that no party answered with an abort.
  static ReplayVerdict unanswered(const ReplayVerdict& v, const Pending& p, const std::string& why) {
    ReplayVerdict out;
    out.violation_seq = p.seq;
    out.reason = p.reason + why;
    out.frames_checked = v.frames_checked;
    out.abort_seq = v.abort_seq;
    return out;
  }

  void check(Step step, const Message& m) {
    switch (step) {
      case Step::ModelCommit: {
        mc_ = decode_model_commit(m.body);
        arch_c_ = numerics::decode_model(mc_.arch_c);
        break;
      }
      case Step::DataCommit: {
        dc_ = decode_data_commit(m.body);
        n_ = dc_.com_x.size();
        if (dc_.com_y.size() != n_) bad("label and feature commitment counts differ");
        break;
      }
      case Step::CoinRevealA: {
        auto r = decode_coin_reveal(m.body, step);
        coin_a_ = r;
        if (!commit::open(pp_, mc_.coin, r.contribution, r.randomness)) bad("P1's coin reveal does not open");
        break;
      }
      case Step::CoinRevealB: {
        auto r = decode_coin_reveal(m.body, step);
        if (!commit::open(pp_, dc_.coin, r.contribution, r.randomness)) bad("P2's coin reveal does not open");
        break;
      }
      case Step::RepIndices: {
        auto r = decode_indices(m.body).rep;
        rep_.assign(r.begin(), r.end());
        std::vector<std::size_t> s = rep_;
        std::sort(s.begin(), s.end());
        if (rep_.size() != cfg_.k || std::adjacent_find(s.begin(), s.end()) != s.end() ||
            (!s.empty() && s.back() >= n_)) {
          bad("representative indices are not k distinct in-range points");
        }
        break;
      }
      case Step::CpChallenge: {
        auto c = decode_cp_challenge(m.body).indices;
        cp_challenge_.assign(c.begin(), c.end());
        if (cp_challenge_.size() != cfg_.challenges_for(n_) ||
            !std::is_sorted(cp_challenge_.begin(), cp_challenge_.end()) ||
            std::adjacent_find(cp_challenge_.begin(), cp_challenge_.end()) != cp_challenge_.end() ||
            (!cp_challenge_.empty() && cp_challenge_.back() >= n_)) {
          bad("CP challenge is not a sorted set of the configured size");
        }
        break;
      }
      case Step::CpProof: {
        auto p = decode_cp_proof(m.body);
        audit::CpVerdict v;
        try {
          v = audit::cp_verify(pp_, dc_.com_x, rep_, cfg_.d, cfg_.delta, cp_challenge_, p.responses);
        } catch (const Error& e) {
          bad(std::string("CP proof invalid: ") + e.what());
        }
        if (!v.accepted) bad("CP proof rejected");
        break;
      }
      case Step::WeightsB: {
        auto w = decode_weights(m.body);
        theta_b_ = numerics::decode_model(w.block_b);
        if (!commit::open(pp_, mc_.com_b, view(audit::weight_tree(theta_b_).root().digest), w.r_b)) {
          bad("block B weights do not open com_B");
        }
        break;
      }
      case Step::InferOutputP1: {
        com_act_ = decode_infer_output_p1(m.body).com_act;
        if (com_act_.size() != rep_.size()) bad("dealer returned the wrong number of commitments");
        break;
      }
      case Step::ActivationsB: {
        act_b_ = decode_activations(m.body);
        if (act_b_.a_b.size() != rep_.size()) bad("wrong number of block B outputs");
        break;
      }
      case Step::ChallengeB: {
        challenge_b_ = decode_challenge(m.body, step).challenge;
        validate_challenge(challenge_b_, rep_.size(), theta_b_.size());
        break;
      }
      case Step::ProofB: {
        auto p = decode_proof(m.body, step);
        auto view = audit::verifier_view(theta_b_, Variant::HiddenData, rep_.size());
        view.public_outputs = &act_b_.a_b;
        view.input_commitments = &com_act_;
        auto v = audit::cnczk_verify(pp_, act_b_.roots, challenge_b_, p.proof, view);
        if (!v.accepted) bad("block B audit rejects: " + v.reason);
        break;
      }
      case Step::OutputCommitC: {
        oc_ = decode_output_commit(m.body);
        if (oc_.com_pred.size() != rep_.size()) bad("wrong number of prediction commitments");
        break;
      }
      case Step::ChallengeC: {
        challenge_c_ = decode_challenge(m.body, step).challenge;
        validate_challenge(challenge_c_, rep_.size(), arch_c_.size());
        break;
      }
      case Step::ProofC: {
        auto p = decode_proof(m.body, step);
        auto view = audit::verifier_view(arch_c_, Variant::HiddenWeights, rep_.size());
        view.public_inputs = &act_b_.a_b;
        view.weights_commitment = mc_.com_c;
        view.weights_commitment_randomness = oc_.r_c;
        auto v = audit::cnczk_verify(pp_, oc_.roots, challenge_c_, p.proof, view);
        if (!v.accepted) bad("block C audit rejects: " + v.reason);
        break;
      }
      case Step::AckC: decode_ack(m.body); break;
      case Step::ScoreP1: decode_score(m.body, step); break;
      default: bad("step is not part of the public transcript");
    }
  }

  RunConfig cfg_;
  commit::CommitParams pp_;
  std::optional<Pending> pending_;
  ModelCommitMsg mc_;
  numerics::Model arch_c_;
  DataCommitMsg dc_;
  std::size_t n_ = 0;
  CoinRevealMsg coin_a_;
  std::vector<std::size_t> rep_;
  std::vector<std::size_t> cp_challenge_;
  numerics::Model theta_b_;
  std::vector<Commitment> com_act_;
  ActivationsMsg act_b_;
  audit::Challenge challenge_b_;
  OutputCommitMsg oc_;
  audit::Challenge challenge_c_;
};

}  // namespace

ReplayVerdict transcript_replay(const Transcript& transcript, const RunConfig& config) {
  return Replayer(config).run(public_view(transcript));
}

}  // namespace privade::protocol
