#include "privade/protocol/config.hpp"

#include <algorithm>
#include <fstream>

#include "privade/audit/cp.hpp"
#include "privade/common/errors.hpp"

namespace privade::protocol {

using numerics::FixedScalar;

audit::AuditPlan AuditRequest::resolve(std::size_t N, std::size_t L) const {
  // Fewer than one corrupted point under rho: plan against a single one.
  if (target > 0.0) return audit::plan_audit(N, L, std::max(rho, 1.0 / static_cast<double>(N)), target);
  audit::AuditPlan plan{N, L, m == 0 ? N : std::min(m, N), s == 0 ? L : std::min(s, L), rho};
  audit::validate(plan);
  return plan;
}

nlohmann::json AuditRequest::to_json() const {
  if (target > 0.0) return {{"rho", rho}, {"target", target}};
  return {{"m", m}, {"s", s}};
}

AuditRequest AuditRequest::from_json(const nlohmann::json& j) {
  AuditRequest a;
  if (j.is_string() && j.get<std::string>() == "full") return a;
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "audit plan must be an object or \"full\"");
  a.m = j.value("m", std::size_t{0});
  a.s = j.value("s", std::size_t{0});
  a.rho = j.value("rho", 0.0);
  a.target = j.value("target", 0.0);
  if (a.target < 0.0 || a.target > 1.0 || a.rho < 0.0 || a.rho > 1.0) {
    fail(ErrorCode::InvalidConfig, "audit rho and target must lie in [0, 1]");
  }
  return a;
}

std::size_t RunConfig::challenges_for(std::size_t n) const {
  if (num_challenges > 0) return std::min(num_challenges, n);
  if (delta <= 0.0 || n < 2) return n;
  return std::min(audit::cp_sample_size(n, delta, cp_constant), n);
}

void RunConfig::validate() const {
  if (k == 0) fail(ErrorCode::InvalidConfig, "k must be positive");
  if (delta < 0.0 || delta >= 1.0) fail(ErrorCode::InvalidConfig, "delta must lie in [0, 1)");
  if (d.raw() <= 0) fail(ErrorCode::InvalidConfig, "d must be positive");
  if (cp_constant < 1.0) fail(ErrorCode::InvalidConfig, "cp_constant must be >= 1");
  if (security_level != 128 && security_level != 256) fail(ErrorCode::InvalidConfig, "security_level must be 128 or 256");
  if (timeout_ms == 0) fail(ErrorCode::InvalidConfig, "timeout_ms must be positive");
}

nlohmann::json RunConfig::to_json() const {
  return {{"k", k},
          {"d", {{"raw", d.raw()}, {"value", numerics::to_decimal(d)}}},
          {"delta", delta},
          {"num_challenges", num_challenges},
          {"cp_constant", cp_constant},
          {"projection_dim", projection_dim},
          {"audit_b", audit_b.to_json()},
          {"audit_c", audit_c.to_json()},
          {"scoring", scoring.to_json()},
          {"security_level", security_level},
          {"seed", seed},
          {"timeout_ms", timeout_ms},
          {"transport", transport == Transport::Socket ? "socket" : "inproc"},
          {"host", host},
          {"port", port}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.k = j.value("k", c.k);
    if (j.contains("d")) {
      const auto& d = j.at("d");
      c.d = d.is_object() ? FixedScalar::from_raw(d.at("raw").get<std::int32_t>())
                          : FixedScalar::from_double(d.get<double>());
    }
    c.delta = j.value("delta", c.delta);
    c.num_challenges = j.value("num_challenges", c.num_challenges);
    c.cp_constant = j.value("cp_constant", c.cp_constant);
    c.projection_dim = j.value("projection_dim", c.projection_dim);
    if (j.contains("audit_b")) c.audit_b = AuditRequest::from_json(j.at("audit_b"));
    if (j.contains("audit_c")) c.audit_c = AuditRequest::from_json(j.at("audit_c"));
    if (j.contains("scoring")) c.scoring = scoring::ScoringConfig::from_json(j.at("scoring"));
    c.security_level = j.value("security_level", c.security_level);
    c.seed = j.value("seed", c.seed);
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    std::string t = j.value("transport", std::string("inproc"));
    if (t == "inproc") c.transport = Transport::InProcess;
    else if (t == "socket") c.transport = Transport::Socket;
    else fail(ErrorCode::InvalidConfig, "unknown transport '" + t + "'");
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, e.what());
  }
  return from_json(j);
}

}  // namespace privade::protocol
