#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace privade::numerics {

inline constexpr int kFracBits = 16;
inline constexpr std::int64_t kOneRaw = std::int64_t{1} << kFracBits;

/// Signed Q16.16 scalar. Arithmetic is checked: any result outside the
/// int32 range throws Error{Overflow} instead of wrapping.
class FixedScalar {
 public:
  constexpr FixedScalar() = default;

  static constexpr FixedScalar from_raw(std::int32_t raw) {
    FixedScalar s;
    s.raw_ = raw;
    return s;
  }
  // Widened value with 16 fractional bits; throws Overflow if it does not fit.
  static FixedScalar from_wide(std::int64_t raw);
  // Round to nearest, ties away from zero.
  static FixedScalar from_double(double v);
  static FixedScalar from_int(std::int32_t v) { return from_wide(std::int64_t{v} * kOneRaw); }
  static constexpr FixedScalar one() { return from_raw(static_cast<std::int32_t>(kOneRaw)); }
  static constexpr FixedScalar zero() { return FixedScalar{}; }

  constexpr std::int32_t raw() const { return raw_; }
  double to_double() const { return static_cast<double>(raw_) / static_cast<double>(kOneRaw); }

  friend FixedScalar operator+(FixedScalar a, FixedScalar b);
  friend FixedScalar operator-(FixedScalar a, FixedScalar b);
  friend FixedScalar operator-(FixedScalar a);
  // 64-bit widening product, then arithmetic shift (floor toward -inf).
  friend FixedScalar operator*(FixedScalar a, FixedScalar b);

  friend constexpr auto operator<=>(FixedScalar, FixedScalar) = default;

 private:
  std::int32_t raw_ = 0;
};

// floor(a / b) in Q16.16; DomainError when b == 0.
FixedScalar fx_div(FixedScalar a, FixedScalar b);

// Fixed-point square root, floor rounding; DomainError for negatives.
FixedScalar fx_sqrt(FixedScalar a);

// Exact decimal rendering of the raw value with 6 fractional digits.
std::string to_decimal(FixedScalar v);

}  // namespace privade::numerics
