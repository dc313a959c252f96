#include "privade/scoring/scoring.hpp"

#include <algorithm>

#include "privade/common/errors.hpp"
#include "privade/common/wide.hpp"
#include "privade/numerics/math.hpp"
#include "privade/selection/selection.hpp"

namespace privade::scoring {

using numerics::fx_ln;
using numerics::fx_softmax;

namespace {

const char* name(UncertaintyKind k) { return k == UncertaintyKind::Entropy ? "entropy" : "margin"; }

const char* name(DiversityKind k) {
  switch (k) {
    case DiversityKind::MaxMin: return "maxmin";
    case DiversityKind::MeanPairwise: return "meanpairwise";
    case DiversityKind::FeatureStd: return "feature-std";
  }
  return "?";
}

nlohmann::json scalar_json(FixedScalar v) { return {{"raw", v.raw()}, {"value", numerics::to_decimal(v)}}; }

FixedScalar weight_from_json(const nlohmann::json& j) {
  if (j.is_object()) return FixedScalar::from_raw(j.at("raw").get<std::int32_t>());
  return FixedScalar::from_double(j.get<double>());
}

FixedScalar mean_raw(i128 sum, std::size_t count) {
  return FixedScalar::from_wide(static_cast<std::int64_t>(floor_div(sum, static_cast<i128>(count))));
}

}  // namespace

nlohmann::json ScoringConfig::to_json() const {
  return {{"weights", {scalar_json(weights.alpha1), scalar_json(weights.alpha2), scalar_json(weights.alpha3)}},
          {"uncertainty", name(uncertainty)},
          {"diversity", name(diversity)}};
}

ScoringConfig ScoringConfig::from_json(const nlohmann::json& j) {
  ScoringConfig c;
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (!w.is_array() || w.size() != 3) fail(ErrorCode::InvalidConfig, "weights must have three entries");
    c.weights = {weight_from_json(w[0]), weight_from_json(w[1]), weight_from_json(w[2])};
  }
  if (j.contains("uncertainty")) {
    auto u = j.at("uncertainty").get<std::string>();
    if (u == "entropy") c.uncertainty = UncertaintyKind::Entropy;
    else if (u == "margin") c.uncertainty = UncertaintyKind::Margin;
    else fail(ErrorCode::InvalidConfig, "unknown uncertainty '" + u + "'");
  }
  if (j.contains("diversity")) {
    auto d = j.at("diversity").get<std::string>();
    if (d == "maxmin") c.diversity = DiversityKind::MaxMin;
    else if (d == "meanpairwise") c.diversity = DiversityKind::MeanPairwise;
    else if (d == "feature-std") c.diversity = DiversityKind::FeatureStd;
    else fail(ErrorCode::InvalidConfig, "unknown diversity '" + d + "'");
  }
  return c;
}

nlohmann::json ScoreReport::to_json() const {
  return {{"l", scalar_json(l)}, {"u", scalar_json(u)}, {"d", scalar_json(d)},
          {"phi", scalar_json(phi)}, {"k", k}, {"checks", checks}};
}

FixedScalar loss_ce(const FixedTensor& probs, const FixedTensor& label) {
  if (probs.size() != label.size()) fail(ErrorCode::ShapeMismatch, "prediction and label lengths differ");
  FixedScalar sum = FixedScalar::zero();
  for (std::size_t c = 0; c < probs.size(); ++c) {
    FixedScalar y = label.at(c);
    if (y.raw() == 0) continue;
    if (probs.at(c).raw() <= 0) fail(ErrorCode::DomainError, "zero probability at a labelled class");
    sum = sum + y * fx_ln(probs.at(c));
  }
  return -sum;
}

FixedScalar uncertainty_entropy(const std::vector<FixedTensor>& probs) {
  if (probs.empty()) fail(ErrorCode::EmptyInput, "no prediction rows");
  i128 total = 0;
  for (const auto& row : probs) {
    FixedScalar h = FixedScalar::zero();
    for (std::size_t c = 0; c < row.size(); ++c) {
      FixedScalar p = row.at(c);
      if (p.raw() < 0) fail(ErrorCode::DomainError, "negative probability");
      if (p.raw() == 0) continue;
      h = h - p * fx_ln(p);
    }
    total += h.raw();
  }
  return mean_raw(total, probs.size());
}

FixedScalar uncertainty_margin(const std::vector<FixedTensor>& probs) {
  if (probs.empty()) fail(ErrorCode::EmptyInput, "no prediction rows");
  i128 total = 0;
  for (const auto& row : probs) {
    if (row.size() < 2) fail(ErrorCode::RowTooShort, "margin needs at least two classes");
    std::vector<std::int32_t> v(row.raw().begin(), row.raw().end());
    std::partial_sort(v.begin(), v.begin() + 2, v.end(), std::greater<>());
    total += std::int64_t{v[0]} - v[1];
  }
  return mean_raw(total, probs.size());
}

FixedScalar diversity_maxmin(const std::vector<FixedTensor>& parent, const std::vector<std::size_t>& rep) {
  auto points = selection::PointSet::from_tensors(parent);
  return selection::percentile_distance(points, selection::RepresentativeSet{rep}, 0.0);
}

FixedScalar diversity_meanpairwise(const std::vector<FixedTensor>& rep) {
  if (rep.size() < 2) fail(ErrorCode::TooFewPoints, "mean pairwise distance needs k >= 2");
  auto points = selection::PointSet::from_tensors(rep);
  i128 total = 0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < rep.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.size(); ++b) {
      total += points.to_distance(points.sq_distance(a, b)).raw();
      ++pairs;
    }
  }
  return mean_raw(total, pairs);
}

FixedScalar diversity_feature_std(const std::vector<FixedTensor>& rep) {
  if (rep.empty()) fail(ErrorCode::TooFewPoints, "feature std needs at least one point");
  const std::size_t dim = rep.front().size();
  const auto k = static_cast<i128>(rep.size());
  i128 total = 0;
  for (std::size_t f = 0; f < dim; ++f) {
    i128 s = 0, s2 = 0;
    for (const auto& x : rep) {
      i128 v = x.raw()[f];
      s += v;
      s2 += v * v;
    }
    // var = (k*s2 - s^2) / k^2 in Q32; sqrt lands in Q16.
    auto var_q32 = static_cast<u128>((k * s2 - s * s) / (k * k));
    total += static_cast<i128>(isqrt(var_q32));
  }
  return mean_raw(total, dim);
}

FixedScalar aggregate(FixedScalar l, FixedScalar u, FixedScalar d, const ScoreWeights& w) {
  return w.alpha1 * l + w.alpha2 * u + w.alpha3 * d;
}

FixedScalar mean_of(const std::vector<FixedScalar>& xs) {
  if (xs.empty()) fail(ErrorCode::EmptyInput, "mean of nothing");
  i128 total = 0;
  for (FixedScalar x : xs) total += x.raw();
  return mean_raw(total, xs.size());
}

ScoreReport score_components(const std::vector<FixedTensor>& logits, const std::vector<FixedTensor>& labels,
                             const std::vector<FixedTensor>& parent, const std::vector<std::size_t>& rep,
                             const ScoringConfig& config) {
  if (logits.size() != rep.size() || labels.size() != rep.size()) {
    fail(ErrorCode::ShapeMismatch, "one prediction and one label per representative required");
  }
  std::vector<FixedTensor> probs;
  std::vector<FixedScalar> losses;
  for (std::size_t k = 0; k < rep.size(); ++k) {
    probs.push_back(fx_softmax(logits[k].reshaped({logits[k].size()})));
    losses.push_back(loss_ce(probs.back(), labels[k]));
  }
  ScoreReport r;
  r.k = rep.size();
  r.l = mean_of(losses);
  r.u = config.uncertainty == UncertaintyKind::Entropy ? uncertainty_entropy(probs) : uncertainty_margin(probs);
  std::vector<FixedTensor> rep_x;
  for (std::size_t i : rep) rep_x.push_back(parent.at(i));
  switch (config.diversity) {
    case DiversityKind::MaxMin:
      // With every point selected the covering radius is zero.
      r.d = rep.size() == parent.size() ? FixedScalar::zero() : diversity_maxmin(parent, rep);
      break;
    case DiversityKind::MeanPairwise: r.d = diversity_meanpairwise(rep_x); break;
    case DiversityKind::FeatureStd: r.d = diversity_feature_std(rep_x); break;
  }
  r.phi = aggregate(r.l, r.u, r.d, config.weights);
  return r;
}

}  // namespace privade::scoring
