#pragma once

#include <cstddef>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "privade/common/drbg.hpp"

namespace privade::audit {

using Rational = boost::multiprecision::cpp_rational;

/// Audit m of N points and s of L layers per audited point, against an
/// adversary corrupting a rho fraction of points.
struct AuditPlan {
  std::size_t N = 0;
  std::size_t L = 0;
  std::size_t m = 0;
  std::size_t s = 0;
  double rho = 0.0;

  friend bool operator==(const AuditPlan&, const AuditPlan&) = default;
};

// PlanInvalid unless 1 <= m <= N, 1 <= s <= L, 0 <= rho <= 1.
void validate(const AuditPlan& plan);

// floor(N * rho) with a small guard for decimal inputs such as 0.1.
std::size_t corrupted_points(std::size_t N, double rho);

// Exact hypergeometric lower bound
//   sum_k C(K,k) C(N-K,m-k) / C(N,m) * (1 - ((L-s)/L)^k),  K = corrupted_points(N, rho).
Rational detection_probability_exact(const AuditPlan& plan);
double detection_probability(const AuditPlan& plan);
std::string to_decimal(const Rational& r, int digits = 12);

// m*s / (N*L) as an exact fraction.
Rational audit_fraction(const AuditPlan& plan);

// Minimal m*s (ties: minimal m) reaching target. Unachievable when even the
// full audit falls short.
AuditPlan plan_audit(std::size_t N, std::size_t L, double rho, double target);

// Monte-Carlo detection rate of the worst-case adversary: each corrupted point
// carries exactly one corrupted layer; detection iff some audited point has
// its corrupted layer audited.
double simulate_detection(const AuditPlan& plan, std::size_t trials, Drbg& rng);

}  // namespace privade::audit
