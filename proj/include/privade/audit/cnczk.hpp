#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "privade/commit/merkle.hpp"
#include "privade/common/drbg.hpp"
#include "privade/numerics/model.hpp"
#include "privade/split/split_model.hpp"

namespace privade::audit {

using numerics::FixedTensor;
using numerics::Model;

enum class Variant : std::uint8_t { HiddenWeights = 1, HiddenData = 2 };
const char* to_string(Variant v);

// Proof backend tag; only the transparent audit backend exists.
inline constexpr std::uint8_t kTransparentBackend = 1;

/// Public trace commitment: R_0..R_L plus R_theta (hidden weights) or R_X (hidden data).
struct TraceCommitment {
  Variant variant = Variant::HiddenWeights;
  std::vector<commit::MerkleRoot> levels;
  std::optional<commit::MerkleRoot> weights_root;
  std::optional<commit::MerkleRoot> data_root;

  void write_to(ByteWriter& w) const;
  static TraceCommitment read_from(ByteReader& r);
};

/// Prover state behind a TraceCommitment.
struct CommittedTrace {
  split::ForwardTrace trace;
  std::vector<commit::MerkleTree> level_trees;
  std::vector<Bytes> weight_leaves;
  std::optional<commit::MerkleTree> weight_tree;
  std::optional<commit::MerkleTree> data_tree;
  TraceCommitment pub;
};

// Leaf content for an activation or input: the serialized whole tensor.
Bytes activation_leaf(const FixedTensor& t);
// Merkle tree over per-layer parameter leaves (position l-1 holds layer l).
commit::MerkleTree weight_tree(const Model& block);
commit::MerkleTree tensor_tree(const std::vector<FixedTensor>& ts);

CommittedTrace cnczk_commit_trace(const Model& block, const std::vector<FixedTensor>& inputs, Variant variant);
// Commit an externally produced trace (possibly dishonest) under the block's weights.
CommittedTrace cnczk_commit_given_trace(const Model& block, split::ForwardTrace trace, Variant variant);

/// S (ascending) and per-point layer sets T_i (1-based, ascending).
struct Challenge {
  std::vector<std::uint32_t> points;
  std::vector<std::vector<std::uint32_t>> layers;

  void write_to(ByteWriter& w) const;
  static Challenge read_from(ByteReader& r);
  friend bool operator==(const Challenge&, const Challenge&) = default;
};

// PlanInvalid unless 1 <= m <= N and 1 <= s <= L.
Challenge cnczk_challenge(Drbg& verifier_rng, std::size_t N, std::size_t L, std::size_t m, std::size_t s);

struct LeafOpening {
  Bytes leaf;
  commit::MerklePath path;
};

struct TransitionProof {
  std::uint32_t point = 0;
  std::uint32_t layer = 0;  // 1-based: checks a_{layer-1} -> a_{layer}
  LeafOpening before;
  LeafOpening after;
  std::optional<LeafOpening> weights;  // hidden-weights variant only
};

/// Hidden-data input consistency: the R_0 leaf equals the R_X leaf and opens
/// the externally issued input commitment.
struct InputProof {
  std::uint32_t point = 0;
  LeafOpening level0;
  LeafOpening data;
  Bytes commitment_randomness;
};

struct CnczkProof {
  Variant variant = Variant::HiddenWeights;
  std::uint8_t backend = kTransparentBackend;
  std::vector<TransitionProof> transitions;
  std::vector<InputProof> inputs;

  void write_to(ByteWriter& w) const;
  static CnczkProof read_from(ByteReader& r);
};

// input_randomness: openings of the input commitments (hidden-data variant).
CnczkProof cnczk_prove(const CommittedTrace& committed, const Challenge& challenge,
                       const std::vector<Bytes>* input_randomness = nullptr);

/// What the verifier knows: layer specs and shapes always; block weights in
/// the hidden-data variant; inputs in the hidden-weights variant.
struct VerifierView {
  Variant variant = Variant::HiddenWeights;
  std::size_t points = 0;
  std::vector<numerics::LayerSpec> specs;
  std::vector<numerics::Shape> shapes;
  std::vector<std::vector<FixedTensor>> public_params;
  const std::vector<FixedTensor>* public_inputs = nullptr;
  const std::vector<FixedTensor>* public_outputs = nullptr;
  const std::vector<commit::Commitment>* input_commitments = nullptr;
  std::optional<commit::Commitment> weights_commitment;
  Bytes weights_commitment_randomness;
};

VerifierView verifier_view(const Model& block, Variant variant, std::size_t points);

struct CnczkVerdict {
  bool accepted = false;
  // First failing (point, layer); layer 0 marks input or root checks.
  std::optional<std::pair<std::size_t, std::size_t>> failure;
  std::string reason;
};

CnczkVerdict cnczk_verify(const commit::CommitParams& pp, const TraceCommitment& roots, const Challenge& challenge,
                          const CnczkProof& proof, const VerifierView& view);

}  // namespace privade::audit
