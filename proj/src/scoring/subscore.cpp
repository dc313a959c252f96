#include "privade/scoring/subscore.hpp"

#include "privade/audit/cnczk.hpp"
#include "privade/common/errors.hpp"

namespace privade::scoring {

SubScoreResult f_subscore(const SubScoreModelOwner& p1, const SubScoreDataOwner& p2, const SubScorePublic& pub) {
  SubScoreResult out;
  const std::size_t k = pub.rep.size();
  auto abort = [&](std::string why) {
    out.abort_reason = std::move(why);
    return out;
  };
  if (p1.predictions.size() != k || p1.prediction_randomness.size() != k || p1.prediction_paths.size() != k ||
      p1.label_commitments.size() != k) {
    return abort("model owner input has wrong arity");
  }
  if (p2.labels.size() != k || p2.label_randomness.size() != k || p2.prediction_commitments.size() != k) {
    return abort("data owner input has wrong arity");
  }
  const std::size_t n = pub.feature_commitments.size();
  if (p2.features.size() != n || p2.feature_randomness.size() != n) return abort("feature set has wrong size");

  for (std::size_t j = 0; j < k; ++j) {
    Bytes pred = audit::activation_leaf(p1.predictions[j]);
    if (!commit::open(pub.pp, p2.prediction_commitments[j], pred, p1.prediction_randomness[j])) {
      return abort("prediction " + std::to_string(j) + " does not open its commitment");
    }
    if (!commit::mt_verify(pub.pp, pub.output_root, j, pred, p1.prediction_paths[j])) {
      return abort("prediction " + std::to_string(j) + " is not the committed trace output");
    }
    if (!commit::open(pub.pp, p1.label_commitments[j], p2.labels[j].serialize(), p2.label_randomness[j])) {
      return abort("label " + std::to_string(j) + " does not open its commitment");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!commit::open(pub.pp, pub.feature_commitments[i], p2.features[i].serialize(), p2.feature_randomness[i])) {
      return abort("feature " + std::to_string(i) + " does not open its commitment");
    }
  }
  try {
    out.report = score_components(p1.predictions, p2.labels, p2.features, pub.rep, pub.config);
  } catch (const Error& e) {
    return abort(std::string("scoring failed: ") + e.what());
  }
  return out;
}

}  // namespace privade::scoring
