#include "privade/common/drbg.hpp"

#include <numeric>

#include "privade/common/errors.hpp"

namespace privade {

namespace {
constexpr std::string_view kDrbgTag = "privade/drbg/v1";
}

Drbg::Drbg(ByteView seed) {
  Sha256 h;
  h.update(as_bytes(kDrbgTag)).update(seed);
  key_ = h.finish();
}

Drbg::Drbg(std::uint64_t seed) {
  ByteWriter w;
  w.u64_be(seed);
  *this = Drbg(ByteView(w.bytes()));
}

void Drbg::refill() {
  std::array<std::uint8_t, 40> buf{};
  std::copy(key_.begin(), key_.end(), buf.begin());
  for (int i = 0; i < 8; ++i) buf[32 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  ++counter_;
  block_ = sha256(ByteView(buf.data(), buf.size()));
  used_ = 0;
}

void Drbg::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) refill();
    b = block_[used_++];
  }
}

Bytes Drbg::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Drbg::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Drbg::uniform(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::DomainError, "uniform bound must be positive");
  // Reject the low residue class so every outcome has equal weight.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t x = next_u64();
    if (x >= threshold) return x % bound;
  }
}

double Drbg::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Drbg Drbg::fork(std::string_view label) {
  Sha256 h;
  h.update(view(key_)).update(as_bytes("/fork/")).update(as_bytes(label));
  Digest child = h.finish();
  return Drbg(view(child));
}

std::vector<std::size_t> choose_distinct(Drbg& rng, std::size_t n, std::size_t m) {
  if (m > n) fail(ErrorCode::DomainError, "cannot choose more distinct items than available");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  return pool;
}

std::vector<std::uint32_t> random_permutation(Drbg& rng, std::size_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace privade
