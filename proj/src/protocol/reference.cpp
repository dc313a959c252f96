#include "privade/protocol/reference.hpp"

#include "privade/audit/cp.hpp"
#include "privade/common/errors.hpp"
#include "privade/numerics/math.hpp"
#include "privade/selection/points.hpp"
#include "privade/selection/selection.hpp"

namespace privade::protocol {

using numerics::FixedTensor;

ReferenceResult f_score_reference(const split::SplitModel& model, const selection::Dataset& data,
                                  const RunConfig& config, const Digest& selection_seed,
                                  const std::vector<std::size_t>* rep_override) {
  ReferenceResult out;
  const std::size_t n = data.size();
  selection::RepresentativeSet rep;
  if (rep_override) {
    rep.indices = *rep_override;
    selection::validate_rep(rep, n);
  } else {
    rep = selection::select_representatives(data.xs, config.k, config.projection_dim, selection_seed);
    if (n > rep.k()) {
      auto dprime = selection::percentile_distance(selection::PointSet::from_tensors(data.xs), rep, config.delta);
      if (dprime >= config.d) {
        out.abort_stage = 1;
        out.reason = "d' is not below d";
        out.rep = rep.indices;
        return out;
      }
    }
  }
  out.rep = rep.indices;

  Drbg rng = Drbg(config.seed).fork("reference-challenge");
  out.challenge = audit::cp_challenge(rng, n, config.challenges_for(n));
  const u128 thr = u128(static_cast<std::uint64_t>(config.d.raw())) * static_cast<std::uint64_t>(config.d.raw());
  for (std::size_t i : out.challenge) {
    bool covered = false;
    for (std::size_t j : rep.indices) {
      if (audit::sq_distance(data.xs[i], data.xs[j]) < thr) {
        covered = true;
        break;
      }
    }
    if (!covered) ++out.cp_failures;
  }
  std::size_t successes = out.challenge.size() - out.cp_failures;
  if (successes < audit::cp_required(out.challenge.size(), config.delta)) {
    out.abort_stage = 1;
    out.reason = "representativeness check failed on " + std::to_string(out.cp_failures) + " of " +
                 std::to_string(out.challenge.size()) + " challenged points";
    return out;
  }

  std::vector<FixedTensor> logits, labels;
  for (std::size_t i : rep.indices) {
    FixedTensor a = split::forward_block(split::Block::A, model, data.xs[i]);
    FixedTensor b = split::forward_block(split::Block::B, model, a);
    logits.push_back(split::forward_block(split::Block::C, model, b));
    labels.push_back(data.ys[i]);
  }
  out.report = scoring::score_components(logits, labels, data.xs, rep.indices, config.scoring);
  out.report->checks = {"reference"};
  return out;
}

}  // namespace privade::protocol
