#include "privade/audit/detection.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "privade/common/errors.hpp"

namespace privade::audit {

using boost::multiprecision::cpp_int;

namespace {

cpp_int binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  cpp_int r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace

void validate(const AuditPlan& p) {
  if (p.N == 0 || p.L == 0) fail(ErrorCode::PlanInvalid, "N and L must be positive");
  if (p.m < 1 || p.m > p.N) fail(ErrorCode::PlanInvalid, "need 1 <= m <= N");
  if (p.s < 1 || p.s > p.L) fail(ErrorCode::PlanInvalid, "need 1 <= s <= L");
  if (!(p.rho >= 0.0 && p.rho <= 1.0)) fail(ErrorCode::PlanInvalid, "need 0 <= rho <= 1");
}

std::size_t corrupted_points(std::size_t N, double rho) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(N) * rho + 1e-9));
}

Rational detection_probability_exact(const AuditPlan& p) {
  validate(p);
  const std::size_t K = corrupted_points(p.N, p.rho);
  const cpp_int total = binomial(p.N, p.m);
  const Rational miss(cpp_int(p.L - p.s), cpp_int(p.L));
  Rational sum = 0;
  Rational miss_k = 1;
  for (std::size_t k = 0; k <= std::min(K, p.m); ++k) {
    if (k > 0) miss_k *= miss;
    cpp_int ways = binomial(K, k) * binomial(p.N - K, p.m - k);
    if (ways == 0) continue;
    sum += Rational(ways, total) * (Rational(1) - miss_k);
  }
  return sum;
}

double detection_probability(const AuditPlan& p) {
  return static_cast<double>(detection_probability_exact(p));
}

std::string to_decimal(const Rational& r, int digits) {
  cpp_int num = boost::multiprecision::numerator(r);
  cpp_int den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  cpp_int whole = num / den;
  cpp_int rem = num % den;
  std::ostringstream out;
  if (neg) out << '-';
  out << whole << '.';
  for (int d = 0; d < digits; ++d) {
    rem *= 10;
    out << (rem / den);
    rem %= den;
  }
  return out.str();
}

Rational audit_fraction(const AuditPlan& p) {
  validate(p);
  return Rational(cpp_int(p.m) * p.s, cpp_int(p.N) * p.L);
}

AuditPlan plan_audit(std::size_t N, std::size_t L, double rho, double target) {
  if (N == 0 || L == 0) fail(ErrorCode::PlanInvalid, "N and L must be positive");
  if (!(target >= 0.0 && target < 1.0)) fail(ErrorCode::PlanInvalid, "target must lie in [0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::PlanInvalid, "need 0 <= rho <= 1");
  const Rational goal(target);
  auto reaches = [&](std::size_t m, std::size_t s) {
    return detection_probability_exact({N, L, m, s, rho}) >= goal;
  };
  if (!reaches(N, L)) {
    fail(ErrorCode::Unachievable, "target " + std::to_string(target) + " not reachable even with a full audit");
  }
  // Detection is monotone in m, so for each s the smallest sufficient m is
  // found by bisection.
  AuditPlan best{N, L, N, L, rho};
  for (std::size_t s = 1; s <= L; ++s) {
    if (!reaches(N, s)) continue;
    std::size_t lo = 1, hi = N;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (reaches(mid, s)) hi = mid;
      else lo = mid + 1;
    }
    std::size_t cost = lo * s, best_cost = best.m * best.s;
    if (cost < best_cost || (cost == best_cost && lo < best.m)) best = {N, L, lo, s, rho};
  }
  return best;
}

double simulate_detection(const AuditPlan& p, std::size_t trials, Drbg& rng) {
  validate(p);
  const std::size_t K = corrupted_points(p.N, p.rho);
  std::size_t detected = 0;
  std::vector<std::size_t> bad_layer(p.N);
  for (std::size_t t = 0; t < trials; ++t) {
    // Which points are corrupted is irrelevant by symmetry; fix them as [0, K).
    for (std::size_t i = 0; i < K; ++i) bad_layer[i] = rng.uniform(p.L);
    bool caught = false;
    for (std::size_t i : choose_distinct(rng, p.N, p.m)) {
      if (i >= K) continue;
      for (std::size_t l : choose_distinct(rng, p.L, p.s)) {
        if (l == bad_layer[i]) {
          caught = true;
          break;
        }
      }
      if (caught) break;
    }
    if (caught) ++detected;
  }
  return static_cast<double>(detected) / static_cast<double>(trials);
}

}  // namespace privade::audit
