#include <doctest.h>

#include "privade/common/drbg.hpp"
#include "privade/common/errors.hpp"
#include "privade/fixtures/synthetic.hpp"
#include "privade/market/ledger.hpp"
#include "privade/market/script.hpp"
#include "privade/protocol/engine.hpp"
#include "privade/protocol/replay.hpp"

using namespace privade;
using namespace privade::market;

namespace {

const std::string kDir = PRIVADE_FIXTURES "/market/";

std::string hex_of(std::uint64_t seed) { return to_hex(Drbg(seed).bytes(32)); }

LedgerState genesis() {
  LedgerState s;
  s.accounts = {{"alice", 1000}, {"bob", 1000}, {"carol", 500}, {"registrar", 0}};
  s.authorities = {"registrar"};
  return s;
}

void tx(LedgerState& s, TxKind k, const std::string& signer, nlohmann::json p) {
  apply_tx(s, {k, signer, std::move(p)});
}

ErrorCode code_of(LedgerState& s, TxKind k, const std::string& signer, nlohmann::json p) {
  try {
    apply_tx(s, {k, signer, std::move(p)});
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("tx was accepted");
  return ErrorCode::TxRejected;
}

// Registers one dataset and one model, then opens quote q1 answered by bob.
LedgerState quoted() {
  LedgerState s = genesis();
  tx(s, TxKind::RegisterData, "registrar",
     {{"data_id", "d1"}, {"owner", "bob"}, {"com_x", hex_of(1)}, {"com_y", hex_of(2)}});
  tx(s, TxKind::RegisterModel, "registrar",
     {{"model_id", "m1"}, {"owner", "alice"}, {"com_a", hex_of(3)}, {"com_b", hex_of(4)}, {"com_c", hex_of(5)}});
  tx(s, TxKind::RequestQuote, "alice", {{"quote_id", "q1"}, {"model_id", "m1"}, {"escrow", 100}});
  tx(s, TxKind::SubmitQuote, "bob",
     {{"quote_id", "q1"}, {"data_id", "d1"}, {"com_x", hex_of(1)}, {"com_y", hex_of(2)}, {"price", 300},
      {"escrow", 50}});
  return s;
}

}  // namespace

TEST_CASE("bundled scripts") {
  auto honest = run_script(load_script(kDir + "honest.ndjson"));
  CHECK_FALSE(honest.rejected.has_value());
  CHECK(honest.conserved());
  CHECK(honest.state.balance("alice") == 750);
  CHECK(honest.state.balance("bob") == 1250);
  CHECK(honest.state.locks.at("data-key").status == LockStatus::Settled);
  CHECK(fairness_hook(honest.state, "final-subscore") == FairnessOutcome::Ok);
  CHECK(honest.log.size() == 10);

  auto mismatch = run_script(load_script(kDir + "mismatched_quote.ndjson"));
  REQUIRE(mismatch.rejected.has_value());
  CHECK(mismatch.rejected->index == 3);
  CHECK(mismatch.rejected->kind == "submit-quote");
  CHECK(mismatch.conserved());

  auto withheld = run_script(load_script(kDir + "withheld_key.ndjson"));
  CHECK(withheld.conserved());
  CHECK(withheld.state.locks.at("data-key").status == LockStatus::Refunded);
  CHECK(withheld.state.balance("alice") + withheld.state.balance("bob") == 2000);

  CHECK_THROWS_AS(parse_script("{\"kind\":\"advance\"}\n"), Error);
  CHECK_THROWS_AS(parse_script("{\"genesis\":{}}\nnot json\n"), Error);
}

TEST_CASE("registration and quotes") {
  LedgerState s = genesis();
  CHECK(code_of(s, TxKind::RegisterData, "bob",
                {{"data_id", "d1"}, {"owner", "bob"}, {"com_x", hex_of(1)}, {"com_y", hex_of(2)}}) ==
        ErrorCode::TxRejected);
  CHECK(code_of(s, TxKind::RegisterData, "registrar",
                {{"data_id", "d1"}, {"owner", "bob"}, {"com_x", "abcd"}, {"com_y", hex_of(2)}}) ==
        ErrorCode::TxRejected);

  s = quoted();
  // Unregistered data and mismatched commitments.
  CHECK(code_of(s, TxKind::SubmitQuote, "carol",
                {{"quote_id", "q1"}, {"data_id", "d9"}, {"com_x", hex_of(1)}, {"com_y", hex_of(2)}, {"price", 1},
                 {"escrow", 1}}) == ErrorCode::TxRejected);
  CHECK(code_of(s, TxKind::SubmitQuote, "bob",
                {{"quote_id", "q1"}, {"data_id", "d1"}, {"com_x", hex_of(9)}, {"com_y", hex_of(2)}, {"price", 1},
                 {"escrow", 1}}) == ErrorCode::TxRejected);
  CHECK(code_of(s, TxKind::RequestQuote, "alice", {{"quote_id", "q2"}, {"model_id", "m1"}, {"escrow", 5000}}) ==
        ErrorCode::TxRejected);
  CHECK(s.quotes.at("q1").responses.size() == 1);
  CHECK(s.escrows.at("quote:q1:d1").holder == "bob");
  CHECK(s.escrows.at("quote:q1:d1").counterparty == "alice");
  CHECK(s.escrows.at("quote:q1:model").counterparty == "bob");
  CHECK(s.balance("alice") == 900);
  CHECK(s.balance("bob") == 950);
}

TEST_CASE("slashing needs evidence and the counterparty") {
  LedgerState s = quoted();
  Amount total = s.total_value();
  CHECK(code_of(s, TxKind::Slash, "alice", {{"escrow_id", "quote:q1:d1"}}) == ErrorCode::TxRejected);
  CHECK(code_of(s, TxKind::Slash, "alice",
                {{"escrow_id", "quote:q1:d1"}, {"evidence", {{"seq", 4}, {"verdict", "voluntary"}}}}) ==
        ErrorCode::TxRejected);
  CHECK(code_of(s, TxKind::Slash, "carol",
                {{"escrow_id", "quote:q1:d1"}, {"evidence", {{"seq", 4}, {"verdict", "violation"}}}}) ==
        ErrorCode::TxRejected);
  tx(s, TxKind::Slash, "alice", {{"escrow_id", "quote:q1:d1"}, {"evidence", {{"seq", 4}, {"verdict", "violation"}}}});
  CHECK(s.balance("alice") == 950);
  CHECK(s.escrows.at("quote:q1:d1").status == EscrowStatus::Slashed);
  CHECK(code_of(s, TxKind::Release, "alice", {{"escrow_id", "quote:q1:d1"}}) == ErrorCode::TxRejected);
  CHECK(s.total_value() == total);

  CHECK(code_of(s, TxKind::Release, "alice", {{"escrow_id", "quote:q1:model"}}) == ErrorCode::TxRejected);
  tx(s, TxKind::Release, "alice", {{"escrow_id", "quote:q1:model"}, {"completed_seq", 23}});
  CHECK(s.balance("alice") == 1050);
}

TEST_CASE("replay evidence drives a slash") {
  auto f = fixtures::make_fixture("gaussians", 60, 6, 2);
  f.config.delta = 0.0;
  f.config.audit_b = protocol::AuditRequest{};
  f.config.audit_c = protocol::AuditRequest{};
  auto r = protocol::run_privade({f.model, 0}, {f.data}, f.config, protocol::Adversary::BobPermutedLabels);
  REQUIRE_FALSE(r.success);
  auto v = protocol::transcript_replay(r.transcript, f.config);
  REQUIRE(protocol::evidence_seq(v).has_value());
  LedgerState s = quoted();
  tx(s, TxKind::Slash, "alice",
     {{"escrow_id", "quote:q1:d1"},
      {"evidence", {{"seq", *protocol::evidence_seq(v)}, {"verdict", protocol::evidence_verdict(v)}}}});
  CHECK(s.escrows.at("quote:q1:d1").status == EscrowStatus::Slashed);
}

TEST_CASE("hashlock exchange") {
  std::string key = hex_of(77);
  std::string h = hash_hex(key);

  LedgerState s = genesis();
  CHECK(hashlock_exchange(s, "l1", "bob", "alice", "cid:1", h, 250, 10, key, 3) == ExchangeOutcome::Settled);
  CHECK(s.balance("alice") == 750);
  CHECK(s.balance("bob") == 1250);

  s = genesis();
  CHECK(hashlock_exchange(s, "l1", "bob", "alice", "cid:1", h, 250, 10, hex_of(78), 3) == ExchangeOutcome::Refunded);
  CHECK(s.balance("alice") == 1000);
  CHECK(s.height == 10);

  s = genesis();
  CHECK(hashlock_exchange(s, "l1", "bob", "alice", "cid:1", h, 250, 10, key, 10) == ExchangeOutcome::Refunded);
  CHECK(s.balance("bob") == 1000);

  s = genesis();
  CHECK(hashlock_exchange(s, "l1", "bob", "alice", "cid:1", h, 250, 10, std::nullopt, 0) == ExchangeOutcome::Refunded);

  s = genesis();
  tx(s, TxKind::PostHashlock, "alice",
     {{"lock_id", "l"}, {"hash", h}, {"payee", "bob"}, {"amount", 100}, {"deadline", 5}});
  CHECK(s.balance("alice") == 900);
  CHECK(code_of(s, TxKind::RevealKey, "bob", {{"lock_id", "l"}, {"key", hex_of(1)}}) == ErrorCode::WrongPreimage);
  CHECK(s.locks.at("l").status == LockStatus::Locked);
  CHECK(code_of(s, TxKind::RevealKey, "carol", {{"lock_id", "l"}, {"key", key}}) == ErrorCode::TxRejected);
  tx(s, TxKind::RevealKey, "bob", {{"lock_id", "l"}, {"key", key}});
  CHECK(s.balance("bob") == 1100);
  CHECK(code_of(s, TxKind::RevealKey, "bob", {{"lock_id", "l"}, {"key", key}}) == ErrorCode::TxRejected);
  CHECK(code_of(s, TxKind::PostHashlock, "alice",
                {{"lock_id", "x"}, {"hash", h}, {"payee", "bob"}, {"amount", 5000}, {"deadline", 5}}) ==
        ErrorCode::TxRejected);
}

TEST_CASE("fairness hook") {
  std::string msg = hex_of(11);
  auto post = [&](LedgerState& s) {
    tx(s, TxKind::PostHashlock, "bob",
       {{"lock_id", "f"}, {"hash", hash_hex(msg)}, {"deadline", 4}, {"purpose", "fairness"},
        {"escrow_id", "quote:q1:d1"}});
  };
  LedgerState s = quoted();
  CHECK(code_of(s, TxKind::PostHashlock, "alice",
                {{"lock_id", "f"}, {"hash", hash_hex(msg)}, {"deadline", 4}, {"purpose", "fairness"},
                 {"escrow_id", "quote:q1:d1"}}) == ErrorCode::TxRejected);
  post(s);
  CHECK(fairness_hook(s, "f") == FairnessOutcome::Pending);
  tx(s, TxKind::RevealKey, "bob", {{"lock_id", "f"}, {"key", msg}});
  CHECK(fairness_hook(s, "f") == FairnessOutcome::Ok);
  CHECK(s.escrows.at("quote:q1:d1").status == EscrowStatus::Active);

  s = quoted();
  post(s);
  tx(s, TxKind::Advance, "bob", {{"blocks", 4}});
  CHECK(fairness_hook(s, "f") == FairnessOutcome::Slashed);
  CHECK(s.escrows.at("quote:q1:d1").status == EscrowStatus::Slashed);
  CHECK(s.balance("alice") == 950);

  s = quoted();
  post(s);
  tx(s, TxKind::RevealKey, "bob", {{"lock_id", "f"}, {"key", hex_of(12)}});
  CHECK(fairness_hook(s, "f") == FairnessOutcome::Slashed);
  CHECK_THROWS_AS(fairness_hook(s, "nope"), Error);
}

TEST_CASE("proof fees") {
  LedgerState s = genesis();
  s.proof_fee = 3;
  tx(s, TxKind::ProofFee, "alice", {{"proofs", 4}, {"payee", "bob"}});
  CHECK(s.balance("alice") == 988);
  CHECK(s.balance("bob") == 1012);
  CHECK(code_of(s, TxKind::ProofFee, "alice", {{"proofs", 4}, {"payee", "alice"}}) == ErrorCode::TxRejected);
  CHECK(code_of(s, TxKind::ProofFee, "carol", {{"proofs", 1000}, {"payee", "bob"}}) == ErrorCode::TxRejected);
}

TEST_CASE("random transaction streams conserve value and never overdraw") {
  Drbg rng(2024);
  const std::vector<std::string> who = {"alice", "bob", "carol"};
  LedgerState s = quoted();
  const Amount total = s.total_value();
  std::vector<std::string> keys;
  std::size_t accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string& a = who[rng.uniform(3)];
    const std::string& b = who[rng.uniform(3)];
    Amount amt = static_cast<Amount>(rng.uniform(400));
    std::string id = "x" + std::to_string(rng.uniform(40));
    LedgerTx t;
    t.signer = a;
    switch (rng.uniform(7)) {
      case 0:
        t.kind = TxKind::Escrow;
        t.payload = {{"escrow_id", id}, {"counterparty", b}, {"amount", amt}};
        break;
      case 1:
        t.kind = TxKind::Slash;
        t.payload = {{"escrow_id", id}, {"evidence", {{"seq", 1}, {"verdict", rng.next_bit() ? "violation" : "timeout"}}}};
        break;
      case 2:
        t.kind = TxKind::Release;
        t.payload = {{"escrow_id", id}};
        if (rng.next_bit()) t.payload["completed_seq"] = 23;
        break;
      case 3: {
        std::string key = hex_of(rng.uniform(5));
        t.kind = TxKind::PostHashlock;
        t.payload = {{"lock_id", id}, {"hash", hash_hex(key)}, {"payee", b}, {"amount", amt},
                     {"deadline", s.height + 1 + rng.uniform(5)}};
        break;
      }
      case 4:
        t.kind = TxKind::RevealKey;
        t.payload = {{"lock_id", id}, {"key", hex_of(rng.uniform(5))}};
        break;
      case 5:
        t.kind = TxKind::ProofFee;
        t.payload = {{"proofs", rng.uniform(20)}, {"payee", b}};
        break;
      default:
        t.kind = TxKind::Advance;
        t.payload = {{"blocks", rng.uniform(3)}};
    }
    LedgerState before = s;
    try {
      apply_tx(s, t);
      ++accepted;
    } catch (const Error&) {
      CHECK(s.to_json() == before.to_json());
    }
    for (const auto& [id2, bal] : s.accounts) REQUIRE(bal >= 0);
    REQUIRE(s.total_value() == total);
  }
  CHECK(accepted > 1000);
  CHECK(LedgerState::from_json(s.to_json()).to_json() == s.to_json());
}

TEST_CASE("tx JSON") {
  LedgerTx t{TxKind::ProofFee, "alice", {{"proofs", 2}, {"payee", "bob"}}};
  CHECK(LedgerTx::from_json(t.to_json()).to_json() == t.to_json());
  CHECK(std::string(to_string(parse_tx_kind("post-hashlock"))) == "post-hashlock");
  CHECK_THROWS_AS(parse_tx_kind("mint"), Error);
}
