#pragma once

#include "privade/commit/commitment.hpp"

namespace privade::selection {

/// One party's share of the joint coin: contribution and its commitment opening.
struct CoinShare {
  Bytes contribution;
  commit::Opened opening;
};

CoinShare make_coin_share(const commit::CommitParams& pp, Drbg& rng, std::size_t bytes = 32);

// seed = H(r_A || r_B).
Digest derive_seed(ByteView r_a, ByteView r_b);

// Checks both reveals against their earlier commitments, then derives the
// seed. CommitmentMismatch names the party whose reveal fails.
Digest coin_flip_seed(const commit::CommitParams& pp, const commit::Commitment& com_a, ByteView r_a,
                      ByteView rand_a, const commit::Commitment& com_b, ByteView r_b, ByteView rand_b);

}  // namespace privade::selection
