#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace privade::market {

using Amount = std::int64_t;

struct DataRecord {
  std::string owner;
  std::string authority;
  std::string com_x, com_y;  // hex digests
};

struct ModelRecord {
  std::string owner;
  std::string authority;
  std::string com_a, com_b, com_c;
};

enum class EscrowStatus { Active, Released, Slashed };

struct Escrow {
  std::string holder;
  std::string counterparty;
  Amount amount = 0;
  std::string purpose;
  EscrowStatus status = EscrowStatus::Active;
};

enum class LockStatus { Locked, Settled, Refunded, Slashed };

/// Payment locks move `amount` from payer to payee on a valid reveal. Fairness
/// locks carry no amount; an expired or mismatched reveal slashes the linked
/// escrow instead.
struct HashLock {
  std::string hash;  // hex SHA-256 of the key or final message
  std::string payer;
  std::string payee;
  Amount amount = 0;
  std::uint64_t deadline = 0;
  std::string purpose;  // "payment" or "fairness"
  std::string escrow;   // fairness: escrow slashed on failure
  std::string ciphertext_ref;
  LockStatus status = LockStatus::Locked;
};

struct QuoteResponse {
  std::string data_id;
  std::string owner;
  Amount price = 0;
  std::string escrow;
};

struct Quote {
  std::string requester;
  std::string model_id;
  std::string requirements;
  std::string escrow;
  std::vector<QuoteResponse> responses;
};

struct LedgerState {
  std::uint64_t height = 0;
  Amount proof_fee = 1;
  std::set<std::string> authorities;
  std::map<std::string, Amount> accounts;
  std::map<std::string, DataRecord> data;
  std::map<std::string, ModelRecord> models;
  std::map<std::string, Quote> quotes;
  std::map<std::string, Escrow> escrows;
  std::map<std::string, HashLock> locks;

  // Balances plus active escrows plus locked payments.
  Amount total_value() const;
  Amount balance(const std::string& id) const;

  nlohmann::json to_json() const;
  static LedgerState from_json(const nlohmann::json& j);
};

enum class TxKind {
  RegisterData,
  RegisterModel,
  RequestQuote,
  SubmitQuote,
  Escrow,
  Slash,
  PostHashlock,
  RevealKey,
  Release,
  ProofFee,
  Advance,
};
const char* to_string(TxKind k);
TxKind parse_tx_kind(const std::string& s);  // TxRejected on unknown kinds

struct LedgerTx {
  TxKind kind = TxKind::Advance;
  std::string signer;
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json to_json() const;
  static LedgerTx from_json(const nlohmann::json& j);
};

// Deterministic transition. Rejections throw Error{TxRejected} (or
// WrongPreimage for a bad payment-lock reveal) and leave `state` unchanged.
void apply_tx(LedgerState& state, const LedgerTx& tx);

// Moves the clock forward. Locks whose deadline is reached are resolved:
// payment locks refund the payer, fairness locks slash the linked escrow.
void advance(LedgerState& state, std::uint64_t blocks);

enum class FairnessOutcome { Pending, Ok, Slashed };
const char* to_string(FairnessOutcome o);

// Status of a fairness lock (pre-commitment to the final SubScore message).
FairnessOutcome fairness_hook(const LedgerState& state, const std::string& lock_id);

// hex(SHA-256(bytes))
std::string hash_hex(const std::string& hex_bytes);

}  // namespace privade::market

namespace privade::market {

enum class ExchangeOutcome { Settled, Refunded };

/// Step-7 exchange driven end to end: the buyer locks `price` under H_k, the
/// seller reveals `key` (if given) once the clock reaches `reveal_height`, and
/// the clock then runs to the deadline. A wrong key throws WrongPreimage from
/// the reveal but the lock stays intact and is refunded at the deadline.
ExchangeOutcome hashlock_exchange(LedgerState& state, const std::string& lock_id, const std::string& seller,
                                  const std::string& buyer, const std::string& ciphertext_ref, const std::string& h_k,
                                  Amount price, std::uint64_t deadline, const std::optional<std::string>& key,
                                  std::uint64_t reveal_height);

}  // namespace privade::market
