#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "privade/commit/commitment.hpp"
#include "privade/common/errors.hpp"
#include "privade/fixtures/synthetic.hpp"
#include "privade/selection/coin_flip.hpp"
#include "privade/selection/dataset.hpp"
#include "privade/selection/projection.hpp"
#include "privade/selection/selection.hpp"

using namespace privade;
using namespace privade::selection;
using numerics::FixedScalar;
using numerics::FixedTensor;

namespace {

FixedTensor point(std::initializer_list<double> v) {
  std::vector<double> d(v);
  return FixedTensor::from_doubles({d.size()}, d);
}

// Exact squared distance in Q32 units straight from the raw values.
u128 raw_sq(const FixedTensor& a, const FixedTensor& b) {
  u128 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    i128 d = static_cast<i128>(a.raw()[i]) - b.raw()[i];
    s += static_cast<u128>(d * d);
  }
  return s;
}

std::vector<u128> brute_min(const std::vector<FixedTensor>& xs, const std::vector<std::size_t>& rep) {
  std::vector<u128> out;
  for (const auto& x : xs) {
    u128 best = ~u128{0};
    for (auto r : rep) best = std::min(best, raw_sq(x, xs[r]));
    out.push_back(best);
  }
  return out;
}

std::vector<FixedTensor> random_points(Drbg& rng, std::size_t n, std::size_t dim, double scale) {
  std::vector<FixedTensor> xs;
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : v) c = scale * (2.0 * rng.uniform01() - 1.0);
    xs.push_back(FixedTensor::from_doubles({dim}, v));
  }
  return xs;
}

}  // namespace

TEST_CASE("k-center greedy examples") {
  Drbg rng(1);
  auto xs = random_points(rng, 12, 3, 2.0);
  auto pts = PointSet::from_tensors(xs);
  auto all = k_center_greedy(pts, 12);
  std::set<std::size_t> uniq(all.indices.begin(), all.indices.end());
  CHECK(uniq.size() == 12);
  CHECK(k_center_greedy(pts, 1).indices == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(k_center_greedy(pts, 13), Error);

  // Square corners: greedy picks 0 and its farthest corner, which is also the
  // best 2-subset by brute force.
  std::vector<FixedTensor> sq = {point({0, 0}), point({1, 0}), point({1, 1}), point({0, 1})};
  auto sp = PointSet::from_tensors(sq);
  auto two = k_center_greedy(sp, 2);
  CHECK(two.indices == std::vector<std::size_t>{0, 2});
  u128 best = ~u128{0};
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      auto m = brute_min(sq, {a, b});
      best = std::min(best, *std::max_element(m.begin(), m.end()));
    }
  }
  auto got = brute_min(sq, two.indices);
  CHECK(*std::max_element(got.begin(), got.end()) == best);
}

TEST_CASE("covering radius is non-increasing in k") {
  Drbg rng(2);
  auto xs = random_points(rng, 120, 4, 3.0);
  auto pts = PointSet::from_tensors(xs);
  u128 prev = ~u128{0};
  for (std::size_t k = 1; k <= 40; ++k) {
    auto m = min_sq_distances(pts, k_center_greedy(pts, k));
    u128 radius = *std::max_element(m.begin(), m.end());
    CHECK(radius <= prev);
    prev = radius;
  }
}

TEST_CASE("representativeness examples and brute-force outlier count") {
  std::vector<FixedTensor> xs = {point({0, 0}), point({0.5, 0}), point({0, 0.5}), point({40, 40})};
  auto pts = PointSet::from_tensors(xs);
  RepresentativeSet self{{0, 1, 2, 3}};
  CHECK(representativeness(pts, self, FixedScalar::from_raw(1), 0.0).holds);
  RepresentativeSet one{{0}};
  auto r = representativeness(pts, one, FixedScalar::from_int(1), 0.0);
  CHECK_FALSE(r.holds);
  CHECK(r.outliers == 1);
  CHECK(representativeness(pts, one, FixedScalar::from_int(1), 0.25).holds);

  Drbg rng(3);
  auto ds = fixtures::gaussian_blobs(rng, 200, 3);
  auto gp = PointSet::from_tensors(ds.xs);
  auto rep = k_center_greedy(gp, 20);
  auto mins = brute_min(ds.xs, rep.indices);
  for (double dv : {0.25, 0.5, 0.75, 1.0}) {
    auto d = FixedScalar::from_double(dv);
    u128 thr = static_cast<u128>(d.raw()) * static_cast<u128>(d.raw());
    std::size_t want = 0;
    for (auto m : mins) want += m >= thr ? 1 : 0;
    CHECK(representativeness(gp, rep, d, 0.1).outliers == want);
  }
}

TEST_CASE("percentile distance") {
  std::vector<FixedTensor> xs = {point({0})};
  for (int i = 1; i <= 9; ++i) xs.push_back(point({static_cast<double>(i)}));
  auto pts = PointSet::from_tensors(xs);
  RepresentativeSet rep{{0}};
  // Sort-based nearest-rank oracle: rank ceil(0.8 * 9) = 8 of distances 1..9.
  std::vector<int> dist = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t rank = static_cast<std::size_t>(std::ceil(0.8 * 9 - 1e-9));
  CHECK(percentile_distance(pts, rep, 0.2) == FixedScalar::from_int(dist[rank - 1]));
  CHECK(percentile_distance(pts, rep, 0.0) == FixedScalar::from_int(9));

  std::vector<FixedTensor> ring = {point({0, 0}), point({3, 0}), point({0, 3}), point({-3, 0}), point({0, -3})};
  auto rp = PointSet::from_tensors(ring);
  for (double delta : {0.0, 0.2, 0.5, 0.9}) CHECK(percentile_distance(rp, rep, delta) == FixedScalar::from_int(3));
  CHECK_THROWS_AS(percentile_distance(rp, RepresentativeSet{{0, 1, 2, 3, 4}}, 0.1), Error);

  Drbg rng(4);
  auto big = random_points(rng, 300, 3, 5.0);
  auto bp = PointSet::from_tensors(big);
  auto brep = k_center_greedy(bp, 15);
  auto top = percentile_distance(bp, brep, 0.0);
  for (double delta : {0.01, 0.05, 0.1, 0.3}) CHECK(percentile_distance(bp, brep, delta) <= top);
}

TEST_CASE("JL projection: zero, linearity, distortion") {
  Drbg rng(5);
  Digest seed{};
  seed[0] = 7;
  auto R = ProjectionMatrix::from_seed(seed, 64, 784);
  auto zero = jl_project(R, FixedTensor({784}));
  CHECK(std::all_of(zero.begin(), zero.end(), [](std::int64_t v) { return v == 0; }));

  std::size_t within = 0;
  for (int t = 0; t < 100; ++t) {
    auto pair = random_points(rng, 2, 784, 1.0);
    FixedTensor diff({784});
    for (std::size_t i = 0; i < 784; ++i) diff.raw()[i] = pair[0].raw()[i] - pair[1].raw()[i];
    auto px = jl_project(R, pair[0]);
    auto py = jl_project(R, pair[1]);
    auto pd = jl_project(R, diff);
    double proj = 0;
    for (std::size_t j = 0; j < 64; ++j) {
      CHECK(px[j] - py[j] == pd[j]);
      double v = std::ldexp(static_cast<double>(pd[j]), -32);
      proj += v * v;
    }
    double orig = std::ldexp(static_cast<double>(raw_sq(pair[0], pair[1])), -32);
    double ratio = proj / orig;
    within += (ratio >= 0.5 && ratio <= 1.5) ? 1 : 0;
  }
  CHECK(within >= 95);
}

TEST_CASE("selection with projection is reproducible from the seed") {
  Drbg rng(6);
  auto xs = random_points(rng, 80, 50, 1.0);
  Digest seed{};
  seed[3] = 1;
  auto a = select_representatives(xs, 10, 16, seed);
  auto b = select_representatives(xs, 10, 16, seed);
  CHECK(a.indices == b.indices);
  CHECK(a.indices.front() == 0);
  auto raw = select_representatives(xs, 10, 0, seed);
  CHECK(raw.indices == k_center_greedy(PointSet::from_tensors(xs), 10).indices);
}

TEST_CASE("coin flip") {
  auto pp = commit::setup_com(128);
  Drbg rng(7);
  auto a = make_coin_share(pp, rng);
  auto b = make_coin_share(pp, rng);
  auto s1 = coin_flip_seed(pp, a.opening.com, a.contribution, a.opening.randomness, b.opening.com, b.contribution,
                           b.opening.randomness);
  auto s2 = coin_flip_seed(pp, a.opening.com, a.contribution, a.opening.randomness, b.opening.com, b.contribution,
                           b.opening.randomness);
  CHECK(s1 == s2);
  CHECK(s1 == derive_seed(a.contribution, b.contribution));
  Bytes bad = b.contribution;
  bad[0] ^= 1;
  CHECK_THROWS_AS(coin_flip_seed(pp, a.opening.com, a.contribution, a.opening.randomness, b.opening.com, bad,
                                 b.opening.randomness),
                  Error);

  std::set<Digest> seeds;
  for (int t = 0; t < 10000; ++t) seeds.insert(derive_seed(rng.bytes(32), rng.bytes(32)));
  CHECK(seeds.size() == 10000);

  // Fixed r_A, random r_B: low bit of the seed passes a monobit test.
  Bytes fixed(32, 0x5a);
  int ones = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) ones += derive_seed(fixed, rng.bytes(32))[31] & 1;
  double z = std::abs(ones - trials / 2.0) / std::sqrt(trials / 4.0);
  CHECK(z < 4.0);
}

TEST_CASE("dataset containers") {
  Drbg rng(8);
  auto ds = fixtures::digit_images(rng, 30);
  CHECK(ds.size() == 30);
  CHECK(ds.feature_shape() == numerics::Shape{1, 8, 8});
  auto back = decode_dataset(encode_dataset(ds));
  CHECK(back.xs == ds.xs);
  CHECK(back.ys == ds.ys);
  CHECK(back.class_of(5) == ds.class_of(5));

  auto csv = import_csv("label,a,b\n# comment\n1,0.5,2\n0,-1,3.25\n");
  CHECK(csv.size() == 2);
  CHECK(csv.num_classes == 2);
  CHECK(csv.xs[1] == point({-1, 3.25}));
  CHECK(csv.class_of(0) == 1);
  CHECK_THROWS_AS(import_csv("1\n"), Error);

  auto bytes = encode_dataset(ds);
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_dataset(bytes), Error);
}
