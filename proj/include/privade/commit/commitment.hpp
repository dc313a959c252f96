#pragma once

#include <cstddef>
#include <string>

#include "privade/common/bytes.hpp"
#include "privade/common/drbg.hpp"
#include "privade/common/sha256.hpp"

namespace privade::commit {

enum class HashAlgorithm { Sha256 };

struct CommitParams {
  HashAlgorithm hash = HashAlgorithm::Sha256;
  std::size_t randomness_bytes = 32;
  unsigned security_level = 128;

  friend bool operator==(const CommitParams&, const CommitParams&) = default;
};

struct Commitment {
  Digest digest{};
  friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct Opened {
  Commitment com;
  Bytes randomness;
};

inline constexpr std::uint8_t kCommitTag = 0x02;

// security_level must be 128 or 256; UnsupportedLevel otherwise.
CommitParams setup_com(unsigned security_level);

// digest = H(0x02 || r || m) with r drawn from `rng`.
Opened commit(const CommitParams& pp, ByteView message, Drbg& rng);
// Same construction with caller-chosen randomness (used when re-deriving).
Commitment commit_with(const CommitParams& pp, ByteView message, ByteView randomness);

bool open(const CommitParams& pp, const Commitment& com, ByteView message, ByteView randomness);

}  // namespace privade::commit
