#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "privade/common/wide.hpp"
#include "privade/numerics/fixed.hpp"
#include "privade/numerics/tensor.hpp"

namespace privade::selection {

/// Flattened points as integers with `frac_bits` fractional bits (16 for raw
/// Q16.16 features, 32 for projected points). Distances are exact integers.
class PointSet {
 public:
  PointSet(std::size_t dim, int frac_bits);
  static PointSet from_tensors(const std::vector<numerics::FixedTensor>& xs);

  void add(std::vector<std::int64_t> coords);
  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  int frac_bits() const { return frac_bits_; }
  const std::int64_t* point(std::size_t i) const { return coords_.data() + i * dim_; }

  // Squared Euclidean distance with 2*frac_bits fractional bits.
  u128 sq_distance(std::size_t i, std::size_t j) const;
  // Squared threshold for a Q16.16 distance, in this set's units.
  u128 sq_threshold(numerics::FixedScalar d) const;
  // floor(sqrt(sq)) rescaled to Q16.16.
  numerics::FixedScalar to_distance(u128 sq) const;

 private:
  std::size_t dim_;
  int frac_bits_;
  std::size_t n_ = 0;
  std::vector<std::int64_t> coords_;
};

}  // namespace privade::selection
