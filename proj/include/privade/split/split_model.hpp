#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "privade/common/bytes.hpp"
#include "privade/numerics/model.hpp"

namespace privade::split {

using numerics::FixedTensor;
using numerics::Model;

enum class Block { A, B, C };
const char* to_string(Block b);

/// C∘B∘A with a secret channel permutation after A. The permutation is folded
/// into A's last mixing layer (output rows) and its inverse into the first
/// downstream mixing layer (input columns), so every block is a plain Model.
struct SplitModel {
  Model a, b, c;
  std::size_t a_end = 0;
  std::size_t cut_bc = 0;
  // mixed[ch] = raw[mixer[ch]] along dimension 0 of A's output.
  std::vector<std::uint32_t> mixer;
  // Global index of the layer holding the inverse permutation.
  std::size_t inverse_layer = 0;
  // True when B contains no mixing layer, so B's output is still permuted.
  bool b_output_mixed = false;

  const Model& block(Block blk) const;
  std::size_t layer_count() const { return a.size() + b.size() + c.size(); }
  std::uint64_t queries() const { return counter_->load(); }

  std::shared_ptr<std::atomic<std::uint64_t>> counter_ = std::make_shared<std::atomic<std::uint64_t>>(0);
};

// First activation index + 1; InvalidCut when the model has no activation or
// no mixing layer before it.
std::size_t block_a_end(const Model& model);

// InvalidCut unless a_end < cut_bc < size().
SplitModel split_model(const Model& model, std::size_t cut_bc, ByteView mixer_seed);
// Explicit permutation (test hook; identity gives an unmixed split).
SplitModel split_model_with_permutation(const Model& model, std::size_t cut_bc,
                                        std::vector<std::uint32_t> perm);

// Applies a block; counts block-A evaluations on the split's query counter.
FixedTensor forward_block(Block blk, const SplitModel& model, const FixedTensor& input);
FixedTensor forward_split(const SplitModel& model, const FixedTensor& input);

// out[ch] = in[perm[ch]] along dimension 0.
FixedTensor permute_channels(const FixedTensor& t, const std::vector<std::uint32_t>& perm);

/// levels[l][i] = a_{l,i}; levels.size() == block layers + 1.
struct ForwardTrace {
  std::vector<std::vector<FixedTensor>> levels;
  std::size_t points() const { return levels.empty() ? 0 : levels.front().size(); }
  std::size_t layers() const { return levels.empty() ? 0 : levels.size() - 1; }
};

ForwardTrace full_trace(const Model& block, const std::vector<FixedTensor>& inputs);

}  // namespace privade::split
