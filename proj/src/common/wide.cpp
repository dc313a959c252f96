#include "privade/common/wide.hpp"

namespace privade {

std::uint64_t isqrt(u128 n) {
  if (n == 0) return 0;
  // Start above the root so the Newton sequence decreases monotonically.
  int bits = 0;
  for (u128 t = n; t != 0; t >>= 1) ++bits;
  u128 x = u128{1} << ((bits + 1) / 2);
  for (;;) {
    u128 y = (x + n / x) >> 1;
    if (y >= x) break;
    x = y;
  }
  return static_cast<std::uint64_t>(x);
}

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

}  // namespace privade
