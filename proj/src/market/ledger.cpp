#include "privade/market/ledger.hpp"

#include <cctype>

#include "privade/common/bytes.hpp"
#include "privade/common/errors.hpp"
#include "privade/common/sha256.hpp"

namespace privade::market {

namespace {

[[noreturn]] void reject(const std::string& why) { fail(ErrorCode::TxRejected, why); }

const char* name(EscrowStatus s) {
  switch (s) {
    case EscrowStatus::Active: return "active";
    case EscrowStatus::Released: return "released";
    case EscrowStatus::Slashed: return "slashed";
  }
  return "?";
}

const char* name(LockStatus s) {
  switch (s) {
    case LockStatus::Locked: return "locked";
    case LockStatus::Settled: return "settled";
    case LockStatus::Refunded: return "refunded";
    case LockStatus::Slashed: return "slashed";
  }
  return "?";
}

EscrowStatus escrow_status(const std::string& s) {
  if (s == "active") return EscrowStatus::Active;
  if (s == "released") return EscrowStatus::Released;
  if (s == "slashed") return EscrowStatus::Slashed;
  reject("unknown escrow status '" + s + "'");
}

LockStatus lock_status(const std::string& s) {
  if (s == "locked") return LockStatus::Locked;
  if (s == "settled") return LockStatus::Settled;
  if (s == "refunded") return LockStatus::Refunded;
  if (s == "slashed") return LockStatus::Slashed;
  reject("unknown lock status '" + s + "'");
}

std::string str(const nlohmann::json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_string() || p.at(key).get<std::string>().empty()) {
    reject(std::string("payload field '") + key + "' must be a non-empty string");
  }
  return p.at(key).get<std::string>();
}

Amount amount(const nlohmann::json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_number_integer()) reject(std::string("payload field '") + key + "' must be an integer");
  Amount a = p.at(key).get<Amount>();
  if (a < 0) reject(std::string("payload field '") + key + "' must be non-negative");
  return a;
}

bool is_count(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t count(const nlohmann::json& p, const char* key) {
  if (!p.contains(key) || !is_count(p.at(key))) {
    reject(std::string("payload field '") + key + "' must be a non-negative integer");
  }
  return p.at(key).get<std::uint64_t>();
}

void debit(LedgerState& s, const std::string& who, Amount a) {
  auto it = s.accounts.find(who);
  if (it == s.accounts.end()) reject("unknown account '" + who + "'");
  if (it->second < a) reject("insufficient balance for '" + who + "'");
  it->second -= a;
}

void credit(LedgerState& s, const std::string& who, Amount a) { s.accounts[who] += a; }

void open_escrow(LedgerState& s, const std::string& id, const std::string& holder, const std::string& counterparty,
                 Amount a, const std::string& purpose) {
  if (s.escrows.count(id)) reject("escrow '" + id + "' already exists");
  if (holder == counterparty) reject("escrow counterparty must differ from the holder");
  debit(s, holder, a);
  s.escrows[id] = Escrow{holder, counterparty, a, purpose, EscrowStatus::Active};
}

Escrow& active_escrow(LedgerState& s, const std::string& id) {
  auto it = s.escrows.find(id);
  if (it == s.escrows.end()) reject("unknown escrow '" + id + "'");
  if (it->second.status != EscrowStatus::Active) reject("escrow '" + id + "' is already " + name(it->second.status));
  return it->second;
}

void slash_escrow(LedgerState& s, Escrow& e) {
  credit(s, e.counterparty, e.amount);
  e.status = EscrowStatus::Slashed;
}

bool is_hex_digest(const std::string& h) {
  if (h.size() != 64) return false;
  for (char c : h) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string digest_field(const nlohmann::json& p, const char* key) {
  std::string h = str(p, key);
  if (!is_hex_digest(h)) reject(std::string("payload field '") + key + "' must be a 32-byte hex digest");
  return h;
}

void register_data(LedgerState& s, const LedgerTx& tx) {
  if (!s.authorities.count(tx.signer)) reject("'" + tx.signer + "' is not a registered authority");
  std::string id = str(tx.payload, "data_id");
  if (s.data.count(id)) reject("data record '" + id + "' is immutable once posted");
  s.data[id] = DataRecord{str(tx.payload, "owner"), tx.signer, digest_field(tx.payload, "com_x"),
                          digest_field(tx.payload, "com_y")};
}

void register_model(LedgerState& s, const LedgerTx& tx) {
  if (!s.authorities.count(tx.signer)) reject("'" + tx.signer + "' is not a registered authority");
  std::string id = str(tx.payload, "model_id");
  if (s.models.count(id)) reject("model record '" + id + "' is immutable once posted");
  s.models[id] = ModelRecord{str(tx.payload, "owner"), tx.signer, digest_field(tx.payload, "com_a"),
                             digest_field(tx.payload, "com_b"), digest_field(tx.payload, "com_c")};
}

void request_quote(LedgerState& s, const LedgerTx& tx) {
  std::string id = str(tx.payload, "quote_id");
  std::string model = str(tx.payload, "model_id");
  if (s.quotes.count(id)) reject("quote '" + id + "' already exists");
  auto m = s.models.find(model);
  if (m == s.models.end()) reject("model '" + model + "' is not registered");
  if (m->second.owner != tx.signer) reject("only the model owner may request quotes for '" + model + "'");
  for (const char* key : {"com_a", "com_b", "com_c"}) {
    if (tx.payload.contains(key)) {
      const std::string& reg = key[4] == 'a' ? m->second.com_a : key[4] == 'b' ? m->second.com_b : m->second.com_c;
      if (tx.payload.at(key) != reg) reject(std::string(key) + " does not match the registered model commitment");
    }
  }
  std::string escrow = "quote:" + id + ":model";
  open_escrow(s, escrow, tx.signer, "market", amount(tx.payload, "escrow"), "deviation");
  s.quotes[id] = Quote{tx.signer, model, tx.payload.value("requirements", std::string()), escrow, {}};
}

void submit_quote(LedgerState& s, const LedgerTx& tx) {
  std::string id = str(tx.payload, "quote_id");
  std::string data_id = str(tx.payload, "data_id");
  auto q = s.quotes.find(id);
  if (q == s.quotes.end()) reject("quote '" + id + "' does not exist");
  auto d = s.data.find(data_id);
  if (d == s.data.end()) reject("data '" + data_id + "' is not registered");
  if (d->second.owner != tx.signer) reject("only the data owner may quote '" + data_id + "'");
  if (str(tx.payload, "com_x") != d->second.com_x || str(tx.payload, "com_y") != d->second.com_y) {
    reject("quote commitments do not match the authority-published record for '" + data_id + "'");
  }
  for (const auto& r : q->second.responses) {
    if (r.data_id == data_id) reject("data '" + data_id + "' already quoted");
  }
  std::string escrow = "quote:" + id + ":" + data_id;
  open_escrow(s, escrow, tx.signer, q->second.requester, amount(tx.payload, "escrow"), "deviation");
  // The model owner's escrow compensates this contributor if the model owner deviates.
  s.escrows.at(q->second.escrow).counterparty = tx.signer;
  q->second.responses.push_back({data_id, tx.signer, amount(tx.payload, "price"), escrow});
}

void generic_escrow(LedgerState& s, const LedgerTx& tx) {
  open_escrow(s, str(tx.payload, "escrow_id"), tx.signer, str(tx.payload, "counterparty"),
              amount(tx.payload, "amount"), tx.payload.value("purpose", std::string("generic")));
}

void slash(LedgerState& s, const LedgerTx& tx) {
  Escrow& e = active_escrow(s, str(tx.payload, "escrow_id"));
  if (!tx.payload.contains("evidence") || !tx.payload.at("evidence").is_object()) {
    reject("slash requires deviation evidence");
  }
  const auto& ev = tx.payload.at("evidence");
  count(ev, "seq");
  std::string verdict = str(ev, "verdict");
  if (verdict == "voluntary") reject("a voluntary pre-challenge abort is penalty-free");
  if (verdict != "violation" && verdict != "timeout") reject("evidence verdict must be 'violation' or 'timeout'");
  if (tx.signer != e.counterparty) reject("only the escrow counterparty may slash");
  slash_escrow(s, e);
}

void release(LedgerState& s, const LedgerTx& tx) {
  Escrow& e = active_escrow(s, str(tx.payload, "escrow_id"));
  bool completed = tx.payload.contains("completed_seq") && is_count(tx.payload.at("completed_seq"));
  if (tx.signer != e.counterparty && !(tx.signer == e.holder && completed)) {
    reject("release needs the counterparty or the holder with a completion reference");
  }
  credit(s, e.holder, e.amount);
  e.status = EscrowStatus::Released;
}

void post_hashlock(LedgerState& s, const LedgerTx& tx) {
  std::string id = str(tx.payload, "lock_id");
  if (s.locks.count(id)) reject("lock '" + id + "' already exists");
  HashLock l;
  l.hash = digest_field(tx.payload, "hash");
  l.payer = tx.signer;
  l.deadline = count(tx.payload, "deadline");
  if (l.deadline <= s.height) reject("lock deadline must lie in the future");
  l.purpose = tx.payload.value("purpose", std::string("payment"));
  if (l.purpose == "payment") {
    l.payee = str(tx.payload, "payee");
    l.amount = amount(tx.payload, "amount");
    l.ciphertext_ref = tx.payload.value("ciphertext_ref", std::string());
    debit(s, l.payer, l.amount);
  } else if (l.purpose == "fairness") {
    l.escrow = str(tx.payload, "escrow_id");
    const Escrow& e = active_escrow(s, l.escrow);
    if (e.holder != tx.signer) reject("fairness lock must be posted by the escrow holder");
  } else {
    reject("lock purpose must be 'payment' or 'fairness'");
  }
  s.locks[id] = l;
}

void reveal_key(LedgerState& s, const LedgerTx& tx) {
  std::string id = str(tx.payload, "lock_id");
  auto it = s.locks.find(id);
  if (it == s.locks.end()) reject("unknown lock '" + id + "'");
  HashLock& l = it->second;
  if (l.status != LockStatus::Locked) reject("lock '" + id + "' is already " + name(l.status));
  if (s.height >= l.deadline) reject("lock '" + id + "' has expired");
  std::string key = str(tx.payload, "key");
  std::string h;
  try {
    h = hash_hex(key);
  } catch (const Error&) {
    reject("key must be hex");
  }
  if (l.purpose == "payment") {
    if (tx.signer != l.payee) reject("only the payee may reveal the key");
    if (h != l.hash) fail(ErrorCode::WrongPreimage, "H(k') does not match the lock");
    credit(s, l.payee, l.amount);
    l.status = LockStatus::Settled;
    return;
  }
  if (tx.signer != l.payer) reject("only the committing party may reveal its final message");
  if (h == l.hash) {
    l.status = LockStatus::Settled;
  } else {
    slash_escrow(s, active_escrow(s, l.escrow));
    l.status = LockStatus::Slashed;
  }
}

void proof_fee(LedgerState& s, const LedgerTx& tx) {
  std::uint64_t proofs = count(tx.payload, "proofs");
  std::string payee = str(tx.payload, "payee");
  if (payee == tx.signer) reject("proof fee payee must differ from the verifier");
  Amount fee = s.proof_fee * static_cast<Amount>(proofs);
  debit(s, tx.signer, fee);
  credit(s, payee, fee);
}

}  // namespace

Amount LedgerState::total_value() const {
  Amount t = 0;
  for (const auto& [id, b] : accounts) t += b;
  for (const auto& [id, e] : escrows) {
    if (e.status == EscrowStatus::Active) t += e.amount;
  }
  for (const auto& [id, l] : locks) {
    if (l.status == LockStatus::Locked) t += l.amount;
  }
  return t;
}

Amount LedgerState::balance(const std::string& id) const {
  auto it = accounts.find(id);
  return it == accounts.end() ? 0 : it->second;
}

nlohmann::json LedgerState::to_json() const {
  nlohmann::json j;
  j["height"] = height;
  j["proof_fee"] = proof_fee;
  j["authorities"] = authorities;
  j["accounts"] = accounts;
  j["data"] = nlohmann::json::object();
  for (const auto& [id, d] : data) {
    j["data"][id] = {{"owner", d.owner}, {"authority", d.authority}, {"com_x", d.com_x}, {"com_y", d.com_y}};
  }
  j["models"] = nlohmann::json::object();
  for (const auto& [id, m] : models) {
    j["models"][id] = {{"owner", m.owner}, {"authority", m.authority},
                       {"com_a", m.com_a}, {"com_b", m.com_b}, {"com_c", m.com_c}};
  }
  j["quotes"] = nlohmann::json::object();
  for (const auto& [id, q] : quotes) {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : q.responses) {
      rs.push_back({{"data_id", r.data_id}, {"owner", r.owner}, {"price", r.price}, {"escrow", r.escrow}});
    }
    j["quotes"][id] = {{"requester", q.requester}, {"model_id", q.model_id}, {"requirements", q.requirements},
                       {"escrow", q.escrow}, {"responses", rs}};
  }
  j["escrows"] = nlohmann::json::object();
  for (const auto& [id, e] : escrows) {
    j["escrows"][id] = {{"holder", e.holder}, {"counterparty", e.counterparty}, {"amount", e.amount},
                        {"purpose", e.purpose}, {"status", name(e.status)}};
  }
  j["locks"] = nlohmann::json::object();
  for (const auto& [id, l] : locks) {
    j["locks"][id] = {{"hash", l.hash},         {"payer", l.payer},       {"payee", l.payee},
                      {"amount", l.amount},     {"deadline", l.deadline}, {"purpose", l.purpose},
                      {"escrow", l.escrow},     {"ciphertext_ref", l.ciphertext_ref},
                      {"status", name(l.status)}};
  }
  j["total_value"] = total_value();
  return j;
}

LedgerState LedgerState::from_json(const nlohmann::json& j) {
  LedgerState s;
  try {
    s.height = j.value("height", std::uint64_t{0});
    s.proof_fee = j.value("proof_fee", Amount{1});
    if (j.contains("authorities")) s.authorities = j.at("authorities").get<std::set<std::string>>();
    if (j.contains("accounts")) s.accounts = j.at("accounts").get<std::map<std::string, Amount>>();
    if (j.contains("data")) {
      for (const auto& [id, d] : j.at("data").items()) {
        s.data[id] = {d.at("owner"), d.at("authority"), d.at("com_x"), d.at("com_y")};
      }
    }
    if (j.contains("models")) {
      for (const auto& [id, m] : j.at("models").items()) {
        s.models[id] = {m.at("owner"), m.at("authority"), m.at("com_a"), m.at("com_b"), m.at("com_c")};
      }
    }
    if (j.contains("quotes")) {
      for (const auto& [id, q] : j.at("quotes").items()) {
        Quote quote{q.at("requester"), q.at("model_id"), q.value("requirements", std::string()), q.at("escrow"), {}};
        for (const auto& r : q.at("responses")) {
          quote.responses.push_back({r.at("data_id"), r.at("owner"), r.at("price"), r.at("escrow")});
        }
        s.quotes[id] = quote;
      }
    }
    if (j.contains("escrows")) {
      for (const auto& [id, e] : j.at("escrows").items()) {
        s.escrows[id] = {e.at("holder"), e.at("counterparty"), e.at("amount"), e.at("purpose"),
                         escrow_status(e.at("status"))};
      }
    }
    if (j.contains("locks")) {
      for (const auto& [id, l] : j.at("locks").items()) {
        s.locks[id] = {l.at("hash"),    l.at("payer"),   l.at("payee"),          l.at("amount"),
                       l.at("deadline"), l.at("purpose"), l.value("escrow", std::string()),
                       l.value("ciphertext_ref", std::string()), lock_status(l.at("status"))};
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Malformed, std::string("ledger state: ") + e.what());
  }
  return s;
}

const char* to_string(TxKind k) {
  switch (k) {
    case TxKind::RegisterData: return "register-data";
    case TxKind::RegisterModel: return "register-model";
    case TxKind::RequestQuote: return "request-quote";
    case TxKind::SubmitQuote: return "submit-quote";
    case TxKind::Escrow: return "escrow";
    case TxKind::Slash: return "slash";
    case TxKind::PostHashlock: return "post-hashlock";
    case TxKind::RevealKey: return "reveal-key";
    case TxKind::Release: return "release";
    case TxKind::ProofFee: return "proof-fee";
    case TxKind::Advance: return "advance";
  }
  return "?";
}

TxKind parse_tx_kind(const std::string& s) {
  for (TxKind k : {TxKind::RegisterData, TxKind::RegisterModel, TxKind::RequestQuote, TxKind::SubmitQuote,
                   TxKind::Escrow, TxKind::Slash, TxKind::PostHashlock, TxKind::RevealKey, TxKind::Release,
                   TxKind::ProofFee, TxKind::Advance}) {
    if (s == to_string(k)) return k;
  }
  reject("unknown tx kind '" + s + "'");
}

nlohmann::json LedgerTx::to_json() const { return {{"kind", to_string(kind)}, {"signer", signer}, {"payload", payload}}; }

LedgerTx LedgerTx::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) reject("tx must be an object with a kind");
  LedgerTx tx;
  tx.kind = parse_tx_kind(j.at("kind").get<std::string>());
  if (!j.contains("signer") || !j.at("signer").is_string()) reject("tx must name its signer");
  tx.signer = j.at("signer").get<std::string>();
  tx.payload = j.value("payload", nlohmann::json::object());
  if (!tx.payload.is_object()) reject("tx payload must be an object");
  return tx;
}

void apply_tx(LedgerState& state, const LedgerTx& tx) {
  if (tx.signer.empty()) reject("unsigned transaction");
  LedgerState next = state;
  try {
    switch (tx.kind) {
      case TxKind::RegisterData: register_data(next, tx); break;
      case TxKind::RegisterModel: register_model(next, tx); break;
      case TxKind::RequestQuote: request_quote(next, tx); break;
      case TxKind::SubmitQuote: submit_quote(next, tx); break;
      case TxKind::Escrow: generic_escrow(next, tx); break;
      case TxKind::Slash: slash(next, tx); break;
      case TxKind::PostHashlock: post_hashlock(next, tx); break;
      case TxKind::RevealKey: reveal_key(next, tx); break;
      case TxKind::Release: release(next, tx); break;
      case TxKind::ProofFee: proof_fee(next, tx); break;
      case TxKind::Advance: advance(next, count(tx.payload, "blocks")); break;
    }
  } catch (const nlohmann::json::exception& e) {
    reject(std::string("malformed payload: ") + e.what());
  }
  state = std::move(next);
}

void advance(LedgerState& state, std::uint64_t blocks) {
  state.height += blocks;
  for (auto& [id, l] : state.locks) {
    if (l.status != LockStatus::Locked || state.height < l.deadline) continue;
    if (l.purpose == "payment") {
      credit(state, l.payer, l.amount);
      l.status = LockStatus::Refunded;
    } else {
      auto e = state.escrows.find(l.escrow);
      if (e != state.escrows.end() && e->second.status == EscrowStatus::Active) slash_escrow(state, e->second);
      l.status = LockStatus::Slashed;
    }
  }
}

const char* to_string(FairnessOutcome o) {
  switch (o) {
    case FairnessOutcome::Pending: return "pending";
    case FairnessOutcome::Ok: return "ok";
    case FairnessOutcome::Slashed: return "slashed";
  }
  return "?";
}

FairnessOutcome fairness_hook(const LedgerState& state, const std::string& lock_id) {
  auto it = state.locks.find(lock_id);
  if (it == state.locks.end() || it->second.purpose != "fairness") reject("unknown fairness lock '" + lock_id + "'");
  switch (it->second.status) {
    case LockStatus::Settled: return FairnessOutcome::Ok;
    case LockStatus::Slashed: return FairnessOutcome::Slashed;
    default: return FairnessOutcome::Pending;
  }
}

std::string hash_hex(const std::string& hex_bytes) { return to_hex(sha256(from_hex(hex_bytes))); }

ExchangeOutcome hashlock_exchange(LedgerState& state, const std::string& lock_id, const std::string& seller,
                                  const std::string& buyer, const std::string& ciphertext_ref, const std::string& h_k,
                                  Amount price, std::uint64_t deadline, const std::optional<std::string>& key,
                                  std::uint64_t reveal_height) {
  apply_tx(state, {TxKind::PostHashlock, buyer,
                   {{"lock_id", lock_id}, {"hash", h_k}, {"payee", seller}, {"amount", price},
                    {"deadline", deadline}, {"purpose", "payment"}, {"ciphertext_ref", ciphertext_ref}}});
  if (reveal_height > state.height) advance(state, reveal_height - state.height);
  if (key) {
    try {
      apply_tx(state, {TxKind::RevealKey, seller, {{"lock_id", lock_id}, {"key", *key}}});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WrongPreimage && e.code() != ErrorCode::TxRejected) throw;
    }
  }
  if (state.locks.at(lock_id).status == LockStatus::Locked && state.height < deadline) {
    advance(state, deadline - state.height);
  }
  return state.locks.at(lock_id).status == LockStatus::Settled ? ExchangeOutcome::Settled : ExchangeOutcome::Refunded;
}

}  // namespace privade::market
