#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "privade/audit/detection.hpp"
#include "privade/numerics/fixed.hpp"
#include "privade/scoring/scoring.hpp"

namespace privade::protocol {

/// Audit plan request for one CnCZK block: explicit (m, s), or a target
/// detection probability against a rho-fraction adversary. m = s = 0 with no
/// target means a full audit.
struct AuditRequest {
  std::size_t m = 0;
  std::size_t s = 0;
  double rho = 0.0;
  double target = 0.0;

  // Concrete plan for N points and L layers; PlanInvalid / Unachievable propagate.
  audit::AuditPlan resolve(std::size_t N, std::size_t L) const;
  nlohmann::json to_json() const;
  static AuditRequest from_json(const nlohmann::json& j);
};

enum class Transport { InProcess, Socket };

/// Public run parameters shared by both parties.
struct RunConfig {
  std::size_t k = 50;
  numerics::FixedScalar d = numerics::FixedScalar::from_int(8);
  double delta = 0.1;
  std::size_t num_challenges = 20;  // 0: derive from n and delta
  double cp_constant = 1.0;
  std::size_t projection_dim = 0;
  AuditRequest audit_b;
  AuditRequest audit_c;
  scoring::ScoringConfig scoring;
  unsigned security_level = 128;
  std::uint64_t seed = 1;
  std::uint32_t timeout_ms = 30000;
  Transport transport = Transport::InProcess;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // CP challenge count for n points.
  std::size_t challenges_for(std::size_t n) const;
  // InvalidConfig on nonsensical values.
  void validate() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

}  // namespace privade::protocol
