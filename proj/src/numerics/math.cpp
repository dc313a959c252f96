#include "privade/numerics/math.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "privade/common/errors.hpp"
#include "privade/numerics/fixed_tables.hpp"

namespace privade::numerics {

namespace {

constexpr int kTableBits = 8;
constexpr int kQ = 30;
constexpr int kRemBits = kQ - kTableBits;
constexpr std::int64_t kRemMask = (std::int64_t{1} << kRemBits) - 1;

// Interpolate a 257-entry table at a Q30 fraction in [0, 1).
std::int64_t interpolate(const std::array<std::int64_t, 257>& table, std::int64_t frac_q30) {
  std::size_t idx = static_cast<std::size_t>(frac_q30 >> kRemBits);
  std::int64_t rem = frac_q30 & kRemMask;
  std::int64_t lo = table[idx];
  std::int64_t hi = table[idx + 1];
  return lo + (((hi - lo) * rem) >> kRemBits);
}

}  // namespace

FixedScalar fx_ln(FixedScalar p) {
  if (p.raw() <= 0) fail(ErrorCode::DomainError, "ln of non-positive value");
  auto raw = static_cast<std::uint32_t>(p.raw());
  int e = std::bit_width(raw) - 1;  // raw = 2^e * (1 + f)
  std::int64_t mant_q30 = (static_cast<std::int64_t>(raw) << (kQ - e)) - (std::int64_t{1} << kQ);
  std::int64_t ln_q30 = (e - kFracBits) * tables::kLn2Q30 + interpolate(tables::kLnMantissaQ30, mant_q30);
  constexpr int shift = kQ - kFracBits;
  return FixedScalar::from_wide((ln_q30 + (std::int64_t{1} << (shift - 1))) >> shift);
}

FixedScalar fx_exp(FixedScalar x) {
  // y = x * log2(e) in Q30.
  std::int64_t y = (std::int64_t{x.raw()} * tables::kLog2eQ30) >> kFracBits;
  std::int64_t q = y >> kQ;
  std::int64_t frac = y & ((std::int64_t{1} << kQ) - 1);
  std::int64_t m_q30 = interpolate(tables::kExp2FracQ30, frac);
  // result_q16 = m_q30 * 2^q / 2^14
  std::int64_t shift = q - (kQ - kFracBits);
  if (shift >= 0) {
    if (shift > 31) fail(ErrorCode::Overflow, "exp overflow");
    std::int64_t v = m_q30 << shift;
    return FixedScalar::from_wide(v);
  }
  if (-shift >= 62) return FixedScalar::zero();
  return FixedScalar::from_wide(m_q30 >> (-shift));
}

FixedTensor fx_softmax(const FixedTensor& logits) {
  if (logits.shape().size() != 1 || logits.size() == 0) {
    fail(ErrorCode::ShapeMismatch, "softmax expects a non-empty 1-D tensor");
  }
  auto in = logits.raw();
  std::int32_t mx = *std::max_element(in.begin(), in.end());
  constexpr std::int64_t kCutoff = -32 * kOneRaw;

  std::vector<std::int64_t> e(in.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::int64_t diff = std::int64_t{in[i]} - mx;
    e[i] = diff < kCutoff ? 0 : fx_exp(FixedScalar::from_wide(diff)).raw();
    sum += e[i];
  }

  std::vector<std::int32_t> out(in.size());
  std::vector<std::int64_t> rem(in.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::int64_t num = e[i] * kOneRaw;
    out[i] = static_cast<std::int32_t>(num / sum);
    rem[i] = num % sum;
    total += out[i];
  }
  std::int64_t deficit = kOneRaw - total;
  if (deficit > 0) {
    std::vector<std::size_t> order(in.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::int64_t k = 0; k < deficit; ++k) ++out[order[static_cast<std::size_t>(k)]];
  }
  return FixedTensor(logits.shape(), std::move(out));
}

}  // namespace privade::numerics
