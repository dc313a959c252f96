#pragma once

#include <optional>
#include <string>
#include <vector>

#include "privade/commit/merkle.hpp"
#include "privade/scoring/scoring.hpp"

namespace privade::scoring {

/// Model owner's SubScore input: predictions for the representative set with
/// their commitment openings and trace paths, plus the label commitments it
/// received from the data owner.
struct SubScoreModelOwner {
  std::vector<FixedTensor> predictions;
  std::vector<Bytes> prediction_randomness;
  std::vector<commit::MerklePath> prediction_paths;  // into R_L at position k
  std::vector<commit::Commitment> label_commitments;
};

/// Data owner's SubScore input: features with openings, representative
/// labels with openings, and the prediction commitments it received.
struct SubScoreDataOwner {
  std::vector<FixedTensor> features;
  std::vector<Bytes> feature_randomness;
  std::vector<FixedTensor> labels;
  std::vector<Bytes> label_randomness;
  std::vector<commit::Commitment> prediction_commitments;
};

/// Public transcript values the functionality binds against.
struct SubScorePublic {
  commit::CommitParams pp;
  std::vector<commit::Commitment> feature_commitments;  // com_x for all n points
  std::vector<std::size_t> rep;
  commit::MerkleRoot output_root;  // R_L of the block-C trace
  ScoringConfig config;
};

struct SubScoreResult {
  std::optional<ScoreReport> report;  // set on success
  std::string abort_reason;
};

// Opens every commitment first (any failure aborts for both parties), then
// scores.
SubScoreResult f_subscore(const SubScoreModelOwner& p1, const SubScoreDataOwner& p2, const SubScorePublic& pub);

}  // namespace privade::scoring
