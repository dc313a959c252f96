#pragma once

#include <cstdint>
#include <string>

namespace privade {

__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

// floor(sqrt(n)) by integer Newton iteration.
std::uint64_t isqrt(u128 n);

// Floor division for signed operands (C++ '/' truncates toward zero).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string to_string(u128 v);

}  // namespace privade
