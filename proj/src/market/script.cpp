#include "privade/market/script.hpp"

#include <sstream>

#include "privade/common/errors.hpp"
#include "privade/numerics/model_io.hpp"

namespace privade::market {

Script parse_script(std::string_view text) {
  Script s;
  bool have_genesis = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::Malformed, "script line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_genesis) {
      if (!j.is_object() || !j.contains("genesis")) {
        fail(ErrorCode::Malformed, "script must start with a genesis record");
      }
      s.genesis = LedgerState::from_json(j.at("genesis"));
      have_genesis = true;
      continue;
    }
    try {
      s.txs.push_back(LedgerTx::from_json(j));
    } catch (const Error& e) {
      fail(ErrorCode::Malformed, "script line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_genesis) fail(ErrorCode::Malformed, "empty script");
  return s;
}

Script load_script(const std::string& path) {
  auto bytes = numerics::read_file(path);
  return parse_script(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

ScriptResult run_script(const Script& script) {
  ScriptResult r;
  r.state = script.genesis;
  r.initial_value = r.state.total_value();
  for (std::size_t i = 0; i < script.txs.size(); ++i) {
    const LedgerTx& tx = script.txs[i];
    nlohmann::json rec = {{"index", i}, {"kind", to_string(tx.kind)}, {"signer", tx.signer}};
    try {
      apply_tx(r.state, tx);
      rec["status"] = "applied";
      rec["height"] = r.state.height;
      r.log.push_back(rec);
    } catch (const Error& e) {
      rec["status"] = "rejected";
      rec["error"] = std::string(to_string(e.code()));
      rec["reason"] = e.what();
      r.log.push_back(rec);
      r.rejected = Rejection{i, to_string(tx.kind), std::string(to_string(e.code())), e.what()};
      break;
    }
  }
  return r;
}

nlohmann::json ScriptResult::to_json() const {
  nlohmann::json j;
  j["state"] = state.to_json();
  j["initial_value"] = initial_value;
  j["conserved"] = conserved();
  j["applied"] = rejected ? rejected->index : log.size();
  if (rejected) {
    j["rejected"] = {{"index", rejected->index}, {"kind", rejected->kind}, {"error", rejected->code},
                     {"reason", rejected->reason}};
  } else {
    j["rejected"] = nullptr;
  }
  return j;
}

std::string ScriptResult::log_ndjson() const {
  std::string out;
  for (const auto& rec : log) out += rec.dump() + "\n";
  return out;
}

}  // namespace privade::market
