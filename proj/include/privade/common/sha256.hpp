#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "privade/common/bytes.hpp"

namespace privade {

using Digest = std::array<std::uint8_t, 32>;

inline ByteView view(const Digest& d) { return {d.data(), d.size()}; }
std::string to_hex(const Digest& d);
Digest digest_from_hex(std::string_view hex);

/// Incremental SHA-256 backed by OpenSSL's EVP interface.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(ByteView data);
  Sha256& update(std::uint8_t byte);
  Digest finish();

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

Digest sha256(ByteView data);

}  // namespace privade
