#include "privade/selection/points.hpp"

#include "privade/common/errors.hpp"

namespace privade::selection {

PointSet::PointSet(std::size_t dim, int frac_bits) : dim_(dim), frac_bits_(frac_bits) {
  if (frac_bits < numerics::kFracBits || frac_bits > 40) {
    fail(ErrorCode::InvalidConfig, "unsupported point precision");
  }
}

PointSet PointSet::from_tensors(const std::vector<numerics::FixedTensor>& xs) {
  if (xs.empty()) fail(ErrorCode::EmptyInput, "no points");
  PointSet ps(xs.front().size(), numerics::kFracBits);
  ps.coords_.reserve(xs.size() * ps.dim_);
  for (const auto& x : xs) {
    if (x.size() != ps.dim_) fail(ErrorCode::ShapeMismatch, "points differ in dimension");
    ps.coords_.insert(ps.coords_.end(), x.raw().begin(), x.raw().end());
    ++ps.n_;
  }
  return ps;
}

void PointSet::add(std::vector<std::int64_t> coords) {
  if (coords.size() != dim_) fail(ErrorCode::ShapeMismatch, "point dimension mismatch");
  coords_.insert(coords_.end(), coords.begin(), coords.end());
  ++n_;
}

u128 PointSet::sq_distance(std::size_t i, std::size_t j) const {
  const std::int64_t* a = point(i);
  const std::int64_t* b = point(j);
  if (frac_bits_ == numerics::kFracBits) {
    // |diff| < 2^32, so each square fits in u64; sum in u128.
    u128 sum = 0;
    for (std::size_t k = 0; k < dim_; ++k) {
      std::int64_t d = a[k] - b[k];
      auto ad = static_cast<std::uint64_t>(d < 0 ? -d : d);
      sum += ad * ad;
    }
    return sum;
  }
  u128 sum = 0;
  for (std::size_t k = 0; k < dim_; ++k) {
    i128 d = static_cast<i128>(a[k]) - b[k];
    sum += static_cast<u128>(d * d);
  }
  return sum;
}

u128 PointSet::sq_threshold(numerics::FixedScalar d) const {
  if (d.raw() < 0) fail(ErrorCode::DomainError, "negative distance threshold");
  u128 scaled = static_cast<u128>(static_cast<std::uint64_t>(d.raw())) << (frac_bits_ - numerics::kFracBits);
  return scaled * scaled;
}

numerics::FixedScalar PointSet::to_distance(u128 sq) const {
  std::uint64_t root = isqrt(sq) >> (frac_bits_ - numerics::kFracBits);
  return numerics::FixedScalar::from_wide(static_cast<std::int64_t>(root));
}

}  // namespace privade::selection
