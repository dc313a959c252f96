#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "privade/numerics/fixed.hpp"
#include "privade/numerics/tensor.hpp"

namespace privade::scoring {

using numerics::FixedScalar;
using numerics::FixedTensor;

/// Linear aggregator weights; defaults 0.2 / 0.1 / 0.7 (raw values sum to 1.0).
struct ScoreWeights {
  FixedScalar alpha1 = FixedScalar::from_raw(13107);
  FixedScalar alpha2 = FixedScalar::from_raw(6554);
  FixedScalar alpha3 = FixedScalar::from_raw(45875);
};

enum class UncertaintyKind { Entropy, Margin };
enum class DiversityKind { MaxMin, MeanPairwise, FeatureStd };

struct ScoringConfig {
  ScoreWeights weights;
  UncertaintyKind uncertainty = UncertaintyKind::Entropy;
  DiversityKind diversity = DiversityKind::MaxMin;

  nlohmann::json to_json() const;
  static ScoringConfig from_json(const nlohmann::json& j);
};

struct ScoreReport {
  FixedScalar l, u, d, phi;
  std::size_t k = 0;
  std::vector<std::string> checks;  // protocol checks that passed, in order

  nlohmann::json to_json() const;
  friend bool operator==(const ScoreReport& a, const ScoreReport& b) {
    return a.l == b.l && a.u == b.u && a.d == b.d && a.phi == b.phi && a.k == b.k;
  }
};

// -sum y_i ln p_i; DomainError when a labelled class has probability <= 0.
FixedScalar loss_ce(const FixedTensor& probs, const FixedTensor& label);
// Mean Shannon entropy (natural log); zero entries contribute 0.
FixedScalar uncertainty_entropy(const std::vector<FixedTensor>& probs);
// Mean of top-1 minus top-2 probability; RowTooShort for rows of length < 2.
FixedScalar uncertainty_margin(const std::vector<FixedTensor>& probs);

// max over parent \ rep of the distance to the nearest representative.
FixedScalar diversity_maxmin(const std::vector<FixedTensor>& parent, const std::vector<std::size_t>& rep);
// Mean of floor-rounded pairwise distances; TooFewPoints when k < 2.
FixedScalar diversity_meanpairwise(const std::vector<FixedTensor>& rep);
// Mean over features of the population standard deviation.
FixedScalar diversity_feature_std(const std::vector<FixedTensor>& rep);

FixedScalar aggregate(FixedScalar l, FixedScalar u, FixedScalar d, const ScoreWeights& w);

// floor(sum / count) over raw values.
FixedScalar mean_of(const std::vector<FixedScalar>& xs);

/// Scores the representative set from model outputs (logits) and labels.
/// `parent` is the full feature set, `rep` the representative indices into it,
/// `logits[k]` and `labels[k]` belong to parent point rep[k].
ScoreReport score_components(const std::vector<FixedTensor>& logits, const std::vector<FixedTensor>& labels,
                             const std::vector<FixedTensor>& parent, const std::vector<std::size_t>& rep,
                             const ScoringConfig& config);

}  // namespace privade::scoring
