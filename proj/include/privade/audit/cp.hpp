#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privade/commit/commitment.hpp"
#include "privade/common/drbg.hpp"
#include "privade/numerics/fixed.hpp"
#include "privade/numerics/tensor.hpp"
#include "privade/selection/selection.hpp"

namespace privade::audit {

using numerics::FixedScalar;
using numerics::FixedTensor;

// ceil(c * ln(n) / delta); DomainError unless n >= 2, 0 < delta <= 1, c >= 1.
std::size_t cp_sample_size(std::size_t n, double delta, double c);

// Uniform set of `count` distinct indices from [0, n), ascending.
std::vector<std::size_t> cp_challenge(Drbg& verifier_rng, std::size_t n, std::size_t count);

/// Answer for one challenged index: either fail, or a witness j in I_R with
/// openings of com_i and com_j (transparent backend).
struct CpResponse {
  std::uint64_t index = 0;
  bool failed = false;
  std::uint64_t witness = 0;
  Bytes x_i, r_i, x_j, r_j;

  void write_to(ByteWriter& w) const;
  static CpResponse read_from(ByteReader& r);
  friend bool operator==(const CpResponse&, const CpResponse&) = default;
};

/// Prover-side view of the committed data set.
struct CpProverData {
  const std::vector<FixedTensor>* xs = nullptr;
  const std::vector<Bytes>* randomness = nullptr;  // r for com_i over xs[i].serialize()
};

// Honest prover: names the nearest representative (lowest index on ties) if
// it lies strictly within d, otherwise replies fail.
std::vector<CpResponse> cp_respond(const CpProverData& data, const selection::RepresentativeSet& rep,
                                   FixedScalar d, const std::vector<std::size_t>& challenge);

struct CpVerdict {
  bool accepted = false;
  std::size_t successes = 0;
  std::size_t required = 0;
  std::vector<std::uint64_t> failed_indices;
};

// Successes needed out of `challenges` under outlier tolerance `delta`:
// ceil((1 - delta) * challenges).
std::size_t cp_required(std::size_t challenges, double delta);

// Checks responses against COM_B and I_R. Proofs that open correctly but name
// a witness outside I_R, or lie at distance >= d, count as failures. A bad
// opening throws CommitmentMismatch; missing, extra, or duplicated responses
// throw Malformed.
CpVerdict cp_verify(const commit::CommitParams& pp, const std::vector<commit::Commitment>& com_x,
                    const std::vector<std::size_t>& rep_indices, FixedScalar d, double delta,
                    const std::vector<std::size_t>& challenge, const std::vector<CpResponse>& responses);

struct CpOutcome {
  std::vector<std::size_t> challenge;
  std::vector<CpResponse> responses;
  CpVerdict verdict;
};

// Both roles in one call: challenge, honest responses for `rep`, verification.
CpOutcome cp_run(Drbg& verifier_rng, const commit::CommitParams& pp, const std::vector<commit::Commitment>& com_x,
                 const CpProverData& data, const selection::RepresentativeSet& rep, std::size_t num_challenges,
                 FixedScalar d, double delta);

// Squared Euclidean distance between raw Q16.16 tensors (ShapeMismatch on size).
u128 sq_distance(const FixedTensor& a, const FixedTensor& b);

}  // namespace privade::audit
