#pragma once

#include <cstddef>
#include <vector>

#include "privade/common/sha256.hpp"
#include "privade/numerics/fixed.hpp"
#include "privade/numerics/tensor.hpp"
#include "privade/selection/points.hpp"

namespace privade::selection {

struct RepresentativeSet {
  std::vector<std::size_t> indices;  // selection order
  std::size_t k() const { return indices.size(); }
};

// Greedy max-min: start at 0, then repeatedly the point farthest from the
// chosen set (ties to the lowest index). KTooLarge when k > n; EmptyInput when n == 0.
RepresentativeSet k_center_greedy(const PointSet& points, std::size_t k);

// Squared distance from every point to its nearest representative.
std::vector<u128> min_sq_distances(const PointSet& points, const RepresentativeSet& rep);

struct RepresentativenessResult {
  bool holds = false;
  std::size_t outliers = 0;  // points with min distance >= d
};

// Holds iff outliers / n <= delta.
RepresentativenessResult representativeness(const PointSet& parent, const RepresentativeSet& rep,
                                            numerics::FixedScalar d, double delta);

// Nearest-rank (1 - delta) quantile of min distances over parent \ rep.
// EmptyComplement when every point is a representative.
numerics::FixedScalar percentile_distance(const PointSet& parent, const RepresentativeSet& rep,
                                          double delta);

// Rank used by percentile_distance for a sample of size n (1-based).
std::size_t nearest_rank(std::size_t n, double delta);

// k-center greedy on raw features, or on JL-projected features when
// projection_dim > 0 (matrix derived from `projection_seed`).
RepresentativeSet select_representatives(const std::vector<numerics::FixedTensor>& xs, std::size_t k,
                                         std::size_t projection_dim, const Digest& projection_seed);

void validate_rep(const RepresentativeSet& rep, std::size_t n);

}  // namespace privade::selection
