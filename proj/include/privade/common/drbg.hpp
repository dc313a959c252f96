#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "privade/common/bytes.hpp"
#include "privade/common/sha256.hpp"

namespace privade {

/// Deterministic SHA-256 counter-mode generator. Identical seeds yield
/// identical streams on every host, which keeps transcripts reproducible.
class Drbg {
 public:
  explicit Drbg(ByteView seed);
  explicit Drbg(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }
  bool next_bit() { return (next_u64() >> 63) != 0; }

  // Uniform in [0, bound); bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Independent child stream bound to a label.
  Drbg fork(std::string_view label);

 private:
  void refill();

  Digest key_{};
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = 32;
};

/// m distinct indices from [0, n), uniform without replacement, in draw order.
std::vector<std::size_t> choose_distinct(Drbg& rng, std::size_t n, std::size_t m);

/// Seed-derived uniform permutation of [0, n) (Fisher-Yates).
std::vector<std::uint32_t> random_permutation(Drbg& rng, std::size_t n);

}  // namespace privade
