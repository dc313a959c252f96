#pragma once

#include <cstddef>
#include <vector>

#include "privade/common/sha256.hpp"
#include "privade/numerics/model.hpp"
#include "privade/scoring/scoring.hpp"
#include "privade/selection/dataset.hpp"

namespace privade::scoring {

struct OracleOptions {
  ScoringConfig scoring;
  std::size_t projection_dim = 0;
  Digest projection_seed{};
};

struct OracleResult {
  ScoreReport report;
  std::vector<std::size_t> rep;
  std::vector<FixedTensor> logits;
};

// Cleartext scoring: k-center greedy selection, inference on the selected
// points with the unsplit model, then loss / uncertainty / diversity and the
// aggregate. KTooLarge when k > n.
OracleResult score_multi_oracle(const numerics::Model& model, const selection::Dataset& data, std::size_t k,
                                const OracleOptions& options);

}  // namespace privade::scoring
