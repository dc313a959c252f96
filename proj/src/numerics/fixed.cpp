#include "privade/numerics/fixed.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "privade/common/errors.hpp"
#include "privade/common/wide.hpp"

namespace privade::numerics {

FixedScalar FixedScalar::from_wide(std::int64_t raw) {
  if (raw < std::numeric_limits<std::int32_t>::min() ||
      raw > std::numeric_limits<std::int32_t>::max()) {
    fail(ErrorCode::Overflow, "Q16.16 value out of range");
  }
  return from_raw(static_cast<std::int32_t>(raw));
}

FixedScalar FixedScalar::from_double(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::Overflow, "non-finite value");
  double scaled = std::round(v * static_cast<double>(kOneRaw));
  if (scaled < static_cast<double>(std::numeric_limits<std::int32_t>::min()) ||
      scaled > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    fail(ErrorCode::Overflow, "Q16.16 value out of range");
  }
  return from_raw(static_cast<std::int32_t>(scaled));
}

FixedScalar operator+(FixedScalar a, FixedScalar b) {
  return FixedScalar::from_wide(std::int64_t{a.raw_} + b.raw_);
}

FixedScalar operator-(FixedScalar a, FixedScalar b) {
  return FixedScalar::from_wide(std::int64_t{a.raw_} - b.raw_);
}

FixedScalar operator-(FixedScalar a) { return FixedScalar::from_wide(-std::int64_t{a.raw_}); }

FixedScalar operator*(FixedScalar a, FixedScalar b) {
  std::int64_t wide = std::int64_t{a.raw_} * std::int64_t{b.raw_};
  return FixedScalar::from_wide(wide >> kFracBits);
}

FixedScalar fx_div(FixedScalar a, FixedScalar b) {
  if (b.raw() == 0) fail(ErrorCode::DomainError, "division by zero");
  std::int64_t num = std::int64_t{a.raw()} * kOneRaw;
  return FixedScalar::from_wide(floor_div(num, std::int64_t{b.raw()}));
}

FixedScalar fx_sqrt(FixedScalar a) {
  if (a.raw() < 0) fail(ErrorCode::DomainError, "sqrt of negative value");
  u128 scaled = static_cast<u128>(static_cast<std::uint64_t>(a.raw())) << kFracBits;
  return FixedScalar::from_wide(static_cast<std::int64_t>(isqrt(scaled)));
}

std::string to_decimal(FixedScalar v) {
  std::int64_t raw = v.raw();
  bool neg = raw < 0;
  std::uint64_t mag = static_cast<std::uint64_t>(neg ? -raw : raw);
  std::uint64_t whole = mag >> kFracBits;
  std::uint64_t frac = mag & static_cast<std::uint64_t>(kOneRaw - 1);
  // 6 digits, rounded half-up on the magnitude.
  std::uint64_t micro = (frac * 1000000 + static_cast<std::uint64_t>(kOneRaw / 2)) >> kFracBits;
  if (micro == 1000000) {
    ++whole;
    micro = 0;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%llu.%06llu", neg && mag != 0 ? "-" : "",
                static_cast<unsigned long long>(whole), static_cast<unsigned long long>(micro));
  return buf;
}

}  // namespace privade::numerics
