#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "privade/common/sha256.hpp"
#include "privade/numerics/tensor.hpp"
#include "privade/selection/points.hpp"

namespace privade::selection {

/// Rademacher projection: entry (j, k) = sign(j, k) * scale, where scale is
/// 1/sqrt(m) in Q16.16. Outputs are exact Q32.32 integers, so projection is
/// exactly linear.
struct ProjectionMatrix {
  std::size_t m = 0;
  std::size_t d = 0;
  std::int64_t scale_raw = 0;
  std::vector<std::int8_t> signs;  // row-major m x d, each +1 or -1
  Digest seed{};

  static ProjectionMatrix from_seed(const Digest& seed, std::size_t m, std::size_t d);
};

inline constexpr int kProjectedFracBits = 32;

// ShapeMismatch when x does not have d elements.
std::vector<std::int64_t> jl_project(const ProjectionMatrix& r, const numerics::FixedTensor& x);
PointSet project_points(const ProjectionMatrix& r, const std::vector<numerics::FixedTensor>& xs);

}  // namespace privade::selection
