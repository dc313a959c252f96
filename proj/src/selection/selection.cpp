#include "privade/selection/selection.hpp"

#include <algorithm>
#include <cmath>

#include "privade/common/errors.hpp"
#include "privade/selection/projection.hpp"

namespace privade::selection {

RepresentativeSet k_center_greedy(const PointSet& points, std::size_t k) {
  const std::size_t n = points.size();
  if (n == 0) fail(ErrorCode::EmptyInput, "no points to select from");
  if (k > n) fail(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  RepresentativeSet rep;
  if (k == 0) return rep;
  std::vector<u128> best(n);
  std::vector<bool> chosen(n, false);
  std::size_t next = 0;
  for (std::size_t step = 0; step < k; ++step) {
    rep.indices.push_back(next);
    chosen[next] = true;
    for (std::size_t i = 0; i < n; ++i) {
      u128 d = points.sq_distance(i, next);
      if (step == 0 || d < best[i]) best[i] = d;
    }
    if (step + 1 == k) break;
    std::size_t arg = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (arg == n || best[i] > best[arg]) arg = i;
    }
    next = arg;
  }
  return rep;
}

RepresentativeSet select_representatives(const std::vector<numerics::FixedTensor>& xs, std::size_t k,
                                         std::size_t projection_dim, const Digest& projection_seed) {
  if (xs.empty()) fail(ErrorCode::EmptyInput, "no points to select from");
  if (projection_dim == 0) return k_center_greedy(PointSet::from_tensors(xs), k);
  auto r = ProjectionMatrix::from_seed(projection_seed, projection_dim, xs.front().size());
  return k_center_greedy(project_points(r, xs), k);
}

void validate_rep(const RepresentativeSet& rep, std::size_t n) {
  std::vector<bool> seen(n, false);
  for (std::size_t i : rep.indices) {
    if (i >= n) fail(ErrorCode::IndexOutOfRange, "representative index " + std::to_string(i));
    if (seen[i]) fail(ErrorCode::InvalidConfig, "duplicate representative index " + std::to_string(i));
    seen[i] = true;
  }
}

std::vector<u128> min_sq_distances(const PointSet& points, const RepresentativeSet& rep) {
  validate_rep(rep, points.size());
  if (rep.indices.empty()) fail(ErrorCode::EmptyInput, "empty representative set");
  std::vector<u128> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    u128 best = points.sq_distance(i, rep.indices.front());
    for (std::size_t r = 1; r < rep.indices.size() && best != 0; ++r) {
      best = std::min(best, points.sq_distance(i, rep.indices[r]));
    }
    out[i] = best;
  }
  return out;
}

RepresentativenessResult representativeness(const PointSet& parent, const RepresentativeSet& rep,
                                            numerics::FixedScalar d, double delta) {
  if (d.raw() <= 0) fail(ErrorCode::DomainError, "distance threshold must be positive");
  if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrorCode::DomainError, "delta outside [0,1]");
  u128 thr = parent.sq_threshold(d);
  RepresentativenessResult res;
  for (u128 v : min_sq_distances(parent, rep)) {
    if (v >= thr) ++res.outliers;
  }
  auto allowed = static_cast<std::size_t>(std::floor(delta * static_cast<double>(parent.size()) + 1e-9));
  res.holds = res.outliers <= allowed;
  return res;
}

std::size_t nearest_rank(std::size_t n, double delta) {
  double r = std::ceil((1.0 - delta) * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(r, 1.0)), 1, n);
}

numerics::FixedScalar percentile_distance(const PointSet& parent, const RepresentativeSet& rep,
                                          double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrorCode::DomainError, "delta outside [0,1]");
  auto mins = min_sq_distances(parent, rep);
  std::vector<bool> in_rep(parent.size(), false);
  for (std::size_t i : rep.indices) in_rep[i] = true;
  std::vector<u128> rest;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (!in_rep[i]) rest.push_back(mins[i]);
  }
  if (rest.empty()) fail(ErrorCode::EmptyComplement, "representative set covers the whole dataset");
  std::sort(rest.begin(), rest.end());
  return parent.to_distance(rest[nearest_rank(rest.size(), delta) - 1]);
}

}  // namespace privade::selection
