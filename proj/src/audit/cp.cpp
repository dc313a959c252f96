#include "privade/audit/cp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "privade/common/errors.hpp"

namespace privade::audit {

std::size_t cp_sample_size(std::size_t n, double delta, double c) {
  if (n < 2) fail(ErrorCode::DomainError, "cp_sample_size needs n >= 2");
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorCode::DomainError, "delta must lie in (0, 1]");
  if (!(c >= 1.0)) fail(ErrorCode::DomainError, "c must be >= 1");
  double v = c * std::log(static_cast<double>(n)) / delta;
  return static_cast<std::size_t>(std::ceil(v - 1e-9));
}

std::vector<std::size_t> cp_challenge(Drbg& verifier_rng, std::size_t n, std::size_t count) {
  if (count > n) fail(ErrorCode::DomainError, "more challenges than points");
  auto idx = choose_distinct(verifier_rng, n, count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void CpResponse::write_to(ByteWriter& w) const {
  w.u64_be(index);
  w.u8(failed ? 1 : 0);
  if (failed) return;
  w.u64_be(witness);
  w.blob(x_i);
  w.blob(r_i);
  w.blob(x_j);
  w.blob(r_j);
}

CpResponse CpResponse::read_from(ByteReader& r) {
  CpResponse c;
  c.index = r.u64_be();
  std::uint8_t f = r.u8();
  if (f > 1) fail(ErrorCode::Malformed, "bad CP response flag");
  c.failed = f == 1;
  if (c.failed) return c;
  c.witness = r.u64_be();
  c.x_i = r.blob();
  c.r_i = r.blob();
  c.x_j = r.blob();
  c.r_j = r.blob();
  return c;
}

u128 sq_distance(const FixedTensor& a, const FixedTensor& b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "distance between tensors of different size");
  u128 sum = 0;
  auto ra = a.raw();
  auto rb = b.raw();
  for (std::size_t k = 0; k < ra.size(); ++k) {
    std::int64_t d = std::int64_t{ra[k]} - rb[k];
    auto ad = static_cast<std::uint64_t>(d < 0 ? -d : d);
    sum += ad * ad;
  }
  return sum;
}

namespace {

u128 sq_of(FixedScalar d) {
  auto v = static_cast<u128>(static_cast<std::uint64_t>(std::max<std::int32_t>(d.raw(), 0)));
  return v * v;
}

}  // namespace

std::vector<CpResponse> cp_respond(const CpProverData& data, const selection::RepresentativeSet& rep,
                                   FixedScalar d, const std::vector<std::size_t>& challenge) {
  const auto& xs = *data.xs;
  const auto& rs = *data.randomness;
  const u128 thr = sq_of(d);
  std::vector<CpResponse> out;
  out.reserve(challenge.size());
  for (std::size_t i : challenge) {
    CpResponse resp;
    resp.index = i;
    std::size_t best = rep.indices.front();
    u128 best_sq = sq_distance(xs.at(i), xs.at(best));
    for (std::size_t j : rep.indices) {
      u128 v = sq_distance(xs.at(i), xs.at(j));
      if (v < best_sq || (v == best_sq && j < best)) {
        best = j;
        best_sq = v;
      }
    }
    if (best_sq >= thr) {
      resp.failed = true;
    } else {
      resp.witness = best;
      resp.x_i = xs[i].serialize();
      resp.r_i = rs.at(i);
      resp.x_j = xs[best].serialize();
      resp.r_j = rs.at(best);
    }
    out.push_back(std::move(resp));
  }
  return out;
}

std::size_t cp_required(std::size_t challenges, double delta) {
  return static_cast<std::size_t>(std::ceil((1.0 - delta) * static_cast<double>(challenges) - 1e-9));
}

CpVerdict cp_verify(const commit::CommitParams& pp, const std::vector<commit::Commitment>& com_x,
                    const std::vector<std::size_t>& rep_indices, FixedScalar d, double delta,
                    const std::vector<std::size_t>& challenge, const std::vector<CpResponse>& responses) {
  if (responses.size() != challenge.size()) {
    fail(ErrorCode::Malformed, "expected " + std::to_string(challenge.size()) + " CP responses, got " +
                                   std::to_string(responses.size()));
  }
  const std::set<std::size_t> rep(rep_indices.begin(), rep_indices.end());
  const u128 thr = sq_of(d);
  CpVerdict v;
  v.required = cp_required(challenge.size(), delta);
  for (std::size_t k = 0; k < challenge.size(); ++k) {
    const CpResponse& resp = responses[k];
    if (resp.index != challenge[k]) {
      fail(ErrorCode::Malformed, "CP response " + std::to_string(k) + " answers index " +
                                     std::to_string(resp.index) + " instead of " + std::to_string(challenge[k]));
    }
    if (resp.failed) {
      v.failed_indices.push_back(resp.index);
      continue;
    }
    if (resp.witness >= com_x.size()) fail(ErrorCode::Malformed, "CP witness index out of range");
    if (!commit::open(pp, com_x.at(resp.index), resp.x_i, resp.r_i) ||
        !commit::open(pp, com_x[resp.witness], resp.x_j, resp.r_j)) {
      fail(ErrorCode::CommitmentMismatch, "CP opening for index " + std::to_string(resp.index) + " does not match");
    }
    bool ok = rep.count(resp.witness) > 0;
    if (ok) {
      try {
        auto xi = FixedTensor::deserialize(resp.x_i);
        auto xj = FixedTensor::deserialize(resp.x_j);
        ok = xi.shape() == xj.shape() && sq_distance(xi, xj) < thr;
      } catch (const Error&) {
        ok = false;
      }
    }
    if (ok) ++v.successes;
    else v.failed_indices.push_back(resp.index);
  }
  v.accepted = v.successes >= v.required;
  return v;
}

CpOutcome cp_run(Drbg& verifier_rng, const commit::CommitParams& pp, const std::vector<commit::Commitment>& com_x,
                 const CpProverData& data, const selection::RepresentativeSet& rep, std::size_t num_challenges,
                 FixedScalar d, double delta) {
  CpOutcome out;
  out.challenge = cp_challenge(verifier_rng, com_x.size(), num_challenges);
  out.responses = cp_respond(data, rep, d, out.challenge);
  out.verdict = cp_verify(pp, com_x, rep.indices, d, delta, out.challenge, out.responses);
  return out;
}

}  // namespace privade::audit
