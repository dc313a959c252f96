#include <doctest.h>

#include <cmath>

#include "privade/audit/cnczk.hpp"
#include "privade/common/errors.hpp"
#include "privade/fixtures/synthetic.hpp"
#include "privade/numerics/architectures.hpp"
#include "privade/numerics/math.hpp"
#include "privade/scoring/oracle.hpp"
#include "privade/scoring/scoring.hpp"
#include "privade/scoring/subscore.hpp"
#include "privade/selection/selection.hpp"

using namespace privade;
using namespace privade::scoring;
using numerics::FixedTensor;

namespace {

FixedTensor row(std::vector<double> v) { return FixedTensor::from_doubles({v.size()}, v); }

FixedTensor uniform_row(std::size_t c) {
  std::vector<std::int32_t> raw(c, static_cast<std::int32_t>(numerics::kOneRaw / static_cast<std::int64_t>(c)));
  return FixedTensor({c}, raw);
}

double dist(const FixedTensor& a, const FixedTensor& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    long double d = (static_cast<long double>(a.raw()[i]) - b.raw()[i]) / 65536.0L;
    s += d * d;
  }
  return static_cast<double>(std::sqrt(s));
}

constexpr double kLsb = 1.0 / 65536.0;

}  // namespace

TEST_CASE("cross-entropy loss") {
  CHECK(std::abs(loss_ce(row({0, 1, 0}), row({0, 1, 0})).to_double()) <= std::ldexp(1.0, -8));
  CHECK(std::abs(loss_ce(row({0.25, 0.25, 0.25, 0.25}), row({0, 0, 1, 0})).to_double() - std::log(4.0)) <=
        std::ldexp(1.0, -7));
  CHECK_THROWS_AS(loss_ce(row({1, 0}), row({0, 1})), Error);
}

TEST_CASE("entropy and margin uncertainty") {
  std::vector<FixedTensor> onehot = {row({1, 0, 0}), row({0, 0, 1})};
  std::vector<FixedTensor> uni = {uniform_row(4), uniform_row(4)};
  CHECK(std::abs(uncertainty_entropy(onehot).to_double()) <= std::ldexp(1.0, -8));
  CHECK(std::abs(uncertainty_entropy(uni).to_double() - std::log(4.0)) <= std::ldexp(1.0, -7));
  auto mix = uncertainty_entropy({onehot[0], uni[0]});
  auto half = (uncertainty_entropy({onehot[0]}).raw() + uncertainty_entropy({uni[0]}).raw());
  CHECK(std::abs(mix.raw() - half / 2) <= 1);

  CHECK(uncertainty_margin(onehot) == numerics::FixedScalar::one());
  CHECK(uncertainty_margin(uni) == numerics::FixedScalar::zero());
  CHECK(std::abs(uncertainty_margin({row({0.5, 0.3, 0.2})}).to_double() - 0.2) <= 2 * kLsb);
  CHECK_THROWS_AS(uncertainty_margin({row({1})}), Error);

  CHECK(uncertainty_entropy(onehot) < uncertainty_entropy(uni));
  CHECK(uncertainty_margin(onehot) > uncertainty_margin(uni));
}

TEST_CASE("max-min diversity") {
  std::vector<FixedTensor> parent = {row({0, 0}), row({1, 0}), row({4, 3})};
  CHECK(std::abs(diversity_maxmin(parent, {0, 1}).to_double() - std::sqrt(18.0)) <= kLsb);
  std::vector<FixedTensor> dup = {row({1, 2}), row({1, 2}), row({1, 2})};
  CHECK(diversity_maxmin(dup, {0}) == numerics::FixedScalar::zero());

  Drbg rng(1);
  auto ds = fixtures::gaussian_blobs(rng, 50, 3, 3);
  auto rep = selection::k_center_greedy(selection::PointSet::from_tensors(ds.xs), 10).indices;
  double want = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    if (std::find(rep.begin(), rep.end(), i) != rep.end()) continue;
    double best = 1e300;
    for (auto r : rep) best = std::min(best, dist(ds.xs[i], ds.xs[r]));
    want = std::max(want, best);
  }
  auto got = diversity_maxmin(ds.xs, rep);
  CHECK(std::abs(got.to_double() - want) <= kLsb);
  CHECK(got == selection::percentile_distance(selection::PointSet::from_tensors(ds.xs), {rep}, 0.0));
}

TEST_CASE("mean pairwise and feature std diversity") {
  CHECK(diversity_meanpairwise({row({0, 0}), row({3, 4})}) == numerics::FixedScalar::from_int(5));
  CHECK(diversity_meanpairwise({row({1, 1}), row({1, 1}), row({1, 1})}) == numerics::FixedScalar::zero());
  CHECK_THROWS_AS(diversity_meanpairwise({row({1})}), Error);

  Drbg rng(2);
  auto ds = fixtures::gaussian_blobs(rng, 5, 2, 4);
  double total = 0;
  int pairs = 0;
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = a + 1; b < 5; ++b) {
      total += dist(ds.xs[a], ds.xs[b]);
      ++pairs;
    }
  }
  CHECK(std::abs(diversity_meanpairwise(ds.xs).to_double() - total / pairs) <= 2 * kLsb);

  double std_total = 0;
  for (std::size_t f = 0; f < 4; ++f) {
    long double m = 0, m2 = 0;
    for (const auto& x : ds.xs) {
      long double v = x.raw()[f] / 65536.0L;
      m += v;
      m2 += v * v;
    }
    m /= 5;
    std_total += static_cast<double>(std::sqrt(m2 / 5 - m * m));
  }
  CHECK(std::abs(diversity_feature_std(ds.xs).to_double() - std_total / 4) <= 2 * kLsb);
}

TEST_CASE("aggregate") {
  using numerics::FixedScalar;
  auto l = FixedScalar::from_double(0.75), u = FixedScalar::from_double(1.5), d = FixedScalar::from_double(2.0);
  CHECK(aggregate(l, u, d, {FixedScalar::one(), FixedScalar::zero(), FixedScalar::zero()}) == l);
  CHECK(aggregate(FixedScalar::zero(), FixedScalar::zero(), FixedScalar::zero(), {}) == FixedScalar::zero());
  CHECK(aggregate(FixedScalar::one(), FixedScalar::one(), FixedScalar::one(), {}) == FixedScalar::one());
}

TEST_CASE("oracle: degenerate k = n, determinism, loss-only aggregate") {
  Drbg rng(3);
  auto model = numerics::mlp(rng, 2, 8, 3);
  auto ds = fixtures::gaussian_blobs(rng, 40, 3);
  OracleOptions opt;
  auto all = score_multi_oracle(model, ds, 40, opt);
  CHECK(all.rep.size() == 40);
  CHECK(all.report.d == numerics::FixedScalar::zero());
  CHECK_THROWS_AS(score_multi_oracle(model, ds, 41, opt), Error);

  auto a = score_multi_oracle(model, ds, 12, opt);
  auto b = score_multi_oracle(model, ds, 12, opt);
  CHECK(a.report == b.report);
  CHECK(a.rep == b.rep);

  opt.scoring.weights = {numerics::FixedScalar::one(), numerics::FixedScalar::zero(), numerics::FixedScalar::zero()};
  auto lo = score_multi_oracle(model, ds, 12, opt);
  std::int64_t sum = 0;
  for (auto i : lo.rep) {
    auto p = numerics::fx_softmax(model.forward(ds.xs[i]));
    sum += loss_ce(p, ds.ys[i]).raw();
  }
  auto floor_mean = sum >= 0 ? sum / 12 : -((-sum + 11) / 12);
  CHECK(lo.report.phi.raw() == floor_mean);
  CHECK(lo.report.l.raw() == floor_mean);
}

TEST_CASE("scoring config round trip") {
  ScoringConfig c;
  c.uncertainty = UncertaintyKind::Margin;
  c.diversity = DiversityKind::FeatureStd;
  c.weights.alpha1 = numerics::FixedScalar::from_double(0.5);
  auto back = ScoringConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(ScoringConfig::from_json({{"uncertainty", "vibes"}}), Error);
}

TEST_CASE("f_subscore: honest, bad label randomness, permuted labels, bad path") {
  Drbg rng(4);
  auto pp = commit::setup_com(128);
  auto model = numerics::mlp(rng, 2, 8, 3);
  auto ds = fixtures::gaussian_blobs(rng, 30, 3);
  auto rep = selection::k_center_greedy(selection::PointSet::from_tensors(ds.xs), 6).indices;

  SubScorePublic pub;
  pub.pp = pp;
  pub.rep = rep;
  SubScoreDataOwner p2;
  p2.features = ds.xs;
  for (const auto& x : ds.xs) {
    auto o = commit::commit(pp, x.serialize(), rng);
    pub.feature_commitments.push_back(o.com);
    p2.feature_randomness.push_back(o.randomness);
  }
  std::vector<FixedTensor> inputs;
  for (auto i : rep) inputs.push_back(ds.xs[i]);
  auto trace = audit::cnczk_commit_trace(model, inputs, audit::Variant::HiddenWeights);
  pub.output_root = trace.pub.levels.back();

  SubScoreModelOwner p1;
  for (std::size_t j = 0; j < rep.size(); ++j) {
    p1.predictions.push_back(trace.trace.levels.back()[j]);
    auto op = commit::commit(pp, audit::activation_leaf(p1.predictions.back()), rng);
    p1.prediction_randomness.push_back(op.randomness);
    p2.prediction_commitments.push_back(op.com);
    p1.prediction_paths.push_back(commit::mt_open(trace.level_trees.back(), j));
    p2.labels.push_back(ds.ys[rep[j]]);
    auto ol = commit::commit(pp, p2.labels.back().serialize(), rng);
    p2.label_randomness.push_back(ol.randomness);
    p1.label_commitments.push_back(ol.com);
  }

  auto ok = f_subscore(p1, p2, pub);
  REQUIRE(ok.report.has_value());
  OracleOptions opt;
  CHECK(*ok.report == score_multi_oracle(model, ds, 6, opt).report);

  auto bad_r = p2;
  bad_r.label_randomness[2][0] ^= 1;
  auto r1 = f_subscore(p1, bad_r, pub);
  CHECK_FALSE(r1.report.has_value());
  CHECK(r1.abort_reason.find("label 2") != std::string::npos);

  auto perm = p2;
  std::size_t a = 0, b = 1;
  while (perm.labels[a] == perm.labels[b]) ++b;
  std::swap(perm.labels[a], perm.labels[b]);
  CHECK_FALSE(f_subscore(p1, perm, pub).report.has_value());

  auto bad_path = p1;
  std::swap(bad_path.prediction_paths[0], bad_path.prediction_paths[1]);
  CHECK_FALSE(f_subscore(bad_path, p2, pub).report.has_value());
}
