#include "privade/selection/projection.hpp"

#include <cmath>

#include "privade/common/drbg.hpp"
#include "privade/common/errors.hpp"

namespace privade::selection {

ProjectionMatrix ProjectionMatrix::from_seed(const Digest& seed, std::size_t m, std::size_t d) {
  if (m == 0 || d == 0) fail(ErrorCode::InvalidConfig, "projection dimensions must be positive");
  ProjectionMatrix r;
  r.m = m;
  r.d = d;
  r.seed = seed;
  r.scale_raw = static_cast<std::int64_t>(std::llround(static_cast<double>(numerics::kOneRaw) /
                                                       std::sqrt(static_cast<double>(m))));
  Drbg rng = Drbg(view(seed)).fork("jl-projection");
  r.signs.resize(m * d);
  std::uint64_t bits = 0;
  for (std::size_t e = 0; e < r.signs.size(); ++e) {
    if (e % 64 == 0) bits = rng.next_u64();
    r.signs[e] = (bits >> (e % 64)) & 1U ? std::int8_t{1} : std::int8_t{-1};
  }
  return r;
}

std::vector<std::int64_t> jl_project(const ProjectionMatrix& r, const numerics::FixedTensor& x) {
  if (x.size() != r.d) {
    fail(ErrorCode::ShapeMismatch, "projection expects " + std::to_string(r.d) + " features, got " +
                                       std::to_string(x.size()));
  }
  auto in = x.raw();
  std::vector<std::int64_t> out(r.m);
  for (std::size_t j = 0; j < r.m; ++j) {
    const std::int8_t* row = r.signs.data() + j * r.d;
    std::int64_t acc = 0;
    for (std::size_t k = 0; k < r.d; ++k) acc += row[k] > 0 ? in[k] : -std::int64_t{in[k]};
    out[j] = acc * r.scale_raw;
  }
  return out;
}

PointSet project_points(const ProjectionMatrix& r, const std::vector<numerics::FixedTensor>& xs) {
  PointSet ps(r.m, kProjectedFracBits);
  for (const auto& x : xs) ps.add(jl_project(r, x));
  return ps;
}

}  // namespace privade::selection
