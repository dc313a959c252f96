#include "privade/protocol/engine.hpp"

#include <chrono>
#include <deque>

#include "privade/common/errors.hpp"
#include "privade/protocol/socket_transport.hpp"
#include "privade/selection/coin_flip.hpp"

namespace privade::protocol {

namespace {

nlohmann::json outcome_json(const PartyOutcome& o) {
  nlohmann::json j;
  if (o.done) j["state"] = "done";
  else if (o.aborted) j["state"] = "aborted";
  else if (o.withdrew) j["state"] = "withdrew";
  else j["state"] = "waiting";
  if (o.aborted) {
    j["stage"] = o.stage;
    j["reason"] = o.reason;
    j["originated"] = o.originated;
  }
  return j;
}

}  // namespace

nlohmann::json RunResult::to_json() const {
  nlohmann::json j;
  j["status"] = success ? "accepted" : "aborted";
  if (report) j["report"] = report->to_json();
  if (abort) {
    j["abort"] = {{"stage", abort->stage},
                  {"party", to_string(abort->party)},
                  {"code", to_string(abort->code)},
                  {"reason", abort->reason},
                  {"seq", abort->seq}};
  }
  j["parties"] = {{"P1", outcome_json(alice)}, {"P2", outcome_json(bob)}, {"dealer", outcome_json(dealer)}};
  j["transcript"] = {{"frames", transcript.frames.size()}, {"bytes", transcript.total_bytes()}};
  if (selection_seed) j["selection_seed"] = to_hex(*selection_seed);
  j["representatives"] = rep;
  j["block_a_queries"] = block_a_queries;
  j["summary"] = summary();
  return j;
}

std::string RunResult::summary() const {
  if (success) return "accepted";
  if (abort) {
    return "Abort: Stage " + std::to_string(abort->stage) + " (" + to_string(abort->party) + "): " + abort->reason;
  }
  return "Abort: run ended without a score";
}

std::optional<Digest> transcript_selection_seed(const Transcript& t) {
  std::optional<CoinRevealMsg> ra, rb;
  for (const auto& m : t.frames) {
    try {
      Step s = peek_step(m);
      if (s == Step::CoinRevealA) ra = decode_coin_reveal(m.body, s);
      if (s == Step::CoinRevealB) rb = decode_coin_reveal(m.body, s);
    } catch (const Error&) {
    }
  }
  if (!ra || !rb) return std::nullopt;
  return selection::derive_seed(ra->contribution, rb->contribution);
}

std::vector<std::size_t> transcript_rep(const Transcript& t) {
  for (const auto& m : t.frames) {
    try {
      if (peek_step(m) == Step::RepIndices) {
        auto rep = decode_indices(m.body).rep;
        return {rep.begin(), rep.end()};
      }
    } catch (const Error&) {
    }
  }
  return {};
}

RunResult summarize(const PartyOutcome& alice, const PartyOutcome& bob, const PartyOutcome& dealer,
                    std::vector<std::string> checks, Transcript transcript) {
  RunResult r;
  r.alice = alice;
  r.bob = bob;
  r.dealer = dealer;
  for (const auto& m : transcript.frames) {
    if (m.kind != MessageKind::Abort) continue;
    AbortInfo info;
    info.party = m.sender;
    info.seq = m.seq;
    try {
      AbortMsg a = decode_abort(m.body);
      info.stage = a.stage;
      info.code = a.code;
      info.reason = a.reason;
    } catch (const Error&) {
      info.reason = "malformed abort frame";
    }
    r.abort = info;
    break;
  }
  if (!r.abort && !(alice.done && bob.done)) {
    const PartyOutcome* stuck = !alice.done ? &alice : &bob;
    r.abort = AbortInfo{stuck->stage, stuck->code, !alice.done ? PartyId::Alice : PartyId::Bob,
                        stuck->reason.empty() ? "run ended without a score" : stuck->reason, 0};
  }
  if (alice.done && bob.done && alice.report && bob.report) {
    if (*alice.report == *bob.report) {
      r.success = !r.abort;
      r.report = *alice.report;
      r.report->checks = std::move(checks);
    } else {
      r.abort = AbortInfo{3, AbortCode::Violation, PartyId::Dealer, "parties received different scores", 0};
    }
  }
  for (const auto& m : transcript.frames) {
    try {
      if (peek_step(m) == Step::InferOutputP1) r.block_a_queries += decode_infer_output_p1(m.body).com_act.size();
    } catch (const Error&) {
    }
  }
  r.selection_seed = transcript_selection_seed(transcript);
  r.rep = transcript_rep(transcript);
  r.transcript = std::move(transcript);
  return r;
}

RunResult drive_in_process(Actor& alice, Actor& bob, Actor& dealer) {
  std::deque<Message> queue;
  Transcript transcript;
  std::uint64_t seq = 0;
  auto push = [&](std::vector<Message> v) {
    for (auto& m : v) queue.push_back(std::move(m));
  };
  auto actor = [&](PartyId p) -> Actor* {
    switch (p) {
      case PartyId::Alice: return &alice;
      case PartyId::Bob: return &bob;
      case PartyId::Dealer: return &dealer;
      default: return nullptr;
    }
  };
  push(alice.start());
  push(bob.start());
  push(dealer.start());
  for (;;) {
    while (!queue.empty()) {
      Message m = std::move(queue.front());
      queue.pop_front();
      m.seq = ++seq;
      transcript.frames.push_back(m);
      if (Actor* to = actor(m.receiver)) push(to->receive(m));
    }
    bool stalled = false;
    for (Actor* a : {&alice, &bob}) {
      if (!a->finished()) {
        push(a->timeout());
        stalled = true;
        break;
      }
    }
    if (!stalled) break;
  }
  std::vector<std::string> checks;
  for (Actor* a : {&alice, &bob, &dealer}) {
    auto c = a->checks();
    checks.insert(checks.end(), c.begin(), c.end());
  }
  return summarize(alice.outcome(), bob.outcome(), dealer.outcome(), std::move(checks), std::move(transcript));
}

RunResult run_privade(const AliceInput& alice_in, const BobInput& bob_in, const RunConfig& config,
                      Adversary adversary) {
  config.validate();
  bob_in.data.validate();
  auto t0 = std::chrono::steady_clock::now();
  split::SplitModel split = prepare_split(alice_in, config);
  RunResult r;
  if (config.transport == Transport::Socket) {
    r = run_socket(split, bob_in.data, config, adversary);
  } else {
    auto alice = make_alice(split, config, adversary);
    auto bob = make_bob(bob_in.data, config, adversary);
    auto dealer = make_dealer(config);
    r = drive_in_process(*alice, *bob, *dealer);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace privade::protocol
