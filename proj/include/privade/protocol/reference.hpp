#pragma once

#include <optional>
#include <string>
#include <vector>

#include "privade/protocol/config.hpp"
#include "privade/scoring/scoring.hpp"
#include "privade/selection/dataset.hpp"
#include "privade/split/split_model.hpp"

namespace privade::protocol {

struct ReferenceResult {
  std::optional<scoring::ScoreReport> report;
  int abort_stage = -1;
  std::string reason;
  std::vector<std::size_t> rep;
  std::vector<std::size_t> challenge;
  std::size_t cp_failures = 0;
};

/// Monolithic ideal scoring functionality: select D_R (or take the given
/// representative set), check representativeness on a random challenge set,
/// run C(B(A(x))) on D_R, and score. No commitments or audits.
ReferenceResult f_score_reference(const split::SplitModel& model, const selection::Dataset& data,
                                  const RunConfig& config, const Digest& selection_seed,
                                  const std::vector<std::size_t>* rep_override = nullptr);

}  // namespace privade::protocol
