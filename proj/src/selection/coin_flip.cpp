#include "privade/selection/coin_flip.hpp"

#include "privade/common/errors.hpp"

namespace privade::selection {

CoinShare make_coin_share(const commit::CommitParams& pp, Drbg& rng, std::size_t bytes) {
  CoinShare s;
  s.contribution = rng.bytes(bytes);
  s.opening = commit::commit(pp, s.contribution, rng);
  return s;
}

Digest derive_seed(ByteView r_a, ByteView r_b) {
  Sha256 h;
  h.update(r_a).update(r_b);
  return h.finish();
}

Digest coin_flip_seed(const commit::CommitParams& pp, const commit::Commitment& com_a, ByteView r_a,
                      ByteView rand_a, const commit::Commitment& com_b, ByteView r_b, ByteView rand_b) {
  if (!commit::open(pp, com_a, r_a, rand_a)) {
    fail(ErrorCode::CommitmentMismatch, "party A coin reveal does not match its commitment");
  }
  if (!commit::open(pp, com_b, r_b, rand_b)) {
    fail(ErrorCode::CommitmentMismatch, "party B coin reveal does not match its commitment");
  }
  return derive_seed(r_a, r_b);
}

}  // namespace privade::selection
