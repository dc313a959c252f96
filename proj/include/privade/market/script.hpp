#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "privade/market/ledger.hpp"

namespace privade::market {

/// NDJSON tx script: first line {"genesis": {...}}, then one LedgerTx per line.
struct Script {
  LedgerState genesis;
  std::vector<LedgerTx> txs;
};

Script parse_script(std::string_view text);
Script load_script(const std::string& path);

struct Rejection {
  std::size_t index = 0;  // 0-based position among the txs
  std::string kind;
  std::string code;
  std::string reason;
};

struct ScriptResult {
  LedgerState state;
  std::vector<nlohmann::json> log;  // one record per attempted tx
  std::optional<Rejection> rejected;
  Amount initial_value = 0;

  bool conserved() const { return state.total_value() == initial_value; }
  nlohmann::json to_json() const;
  std::string log_ndjson() const;
};

// Stops at the first rejected tx; the returned state is the last good one.
ScriptResult run_script(const Script& script);

}  // namespace privade::market
