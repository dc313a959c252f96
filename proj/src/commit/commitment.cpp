#include "privade/commit/commitment.hpp"

#include "privade/common/errors.hpp"

namespace privade::commit {

CommitParams setup_com(unsigned security_level) {
  if (security_level != 128 && security_level != 256) {
    fail(ErrorCode::UnsupportedLevel, "security level " + std::to_string(security_level));
  }
  CommitParams pp;
  pp.security_level = security_level;
  return pp;
}

Commitment commit_with(const CommitParams& pp, ByteView message, ByteView randomness) {
  if (randomness.size() != pp.randomness_bytes) {
    fail(ErrorCode::CommitmentMismatch, "commitment randomness has wrong length");
  }
  Sha256 h;
  h.update(kCommitTag).update(randomness).update(message);
  return Commitment{h.finish()};
}

Opened commit(const CommitParams& pp, ByteView message, Drbg& rng) {
  Bytes r = rng.bytes(pp.randomness_bytes);
  Commitment c = commit_with(pp, message, r);
  return Opened{c, std::move(r)};
}

bool open(const CommitParams& pp, const Commitment& com, ByteView message, ByteView randomness) {
  if (randomness.size() != pp.randomness_bytes) return false;
  return commit_with(pp, message, randomness) == com;
}

}  // namespace privade::commit
