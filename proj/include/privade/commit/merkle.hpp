#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "privade/commit/commitment.hpp"

namespace privade::commit {

inline constexpr std::uint8_t kLeafTag = 0x00;
inline constexpr std::uint8_t kNodeTag = 0x01;

enum class Side : std::uint8_t { Left = 0, Right = 1 };

struct MerkleRoot {
  Digest digest{};
  friend bool operator==(const MerkleRoot&, const MerkleRoot&) = default;
};

struct PathStep {
  Digest sibling{};
  Side side = Side::Left;  // side of the sibling relative to the running hash
  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct MerklePath {
  std::uint64_t index = 0;
  std::vector<PathStep> steps;
  friend bool operator==(const MerklePath&, const MerklePath&) = default;
};

// H(0x00 || u64 BE index || m)
Digest leaf_hash(std::uint64_t index, ByteView message);
Digest node_hash(const Digest& left, const Digest& right);
// Constant digest occupying padding positions.
const Digest& pad_leaf();

/// Complete binary tree over max(2, next_pow2(n)) positions; positions past n
/// hold pad_leaf(). Levels are kept so openings are O(log n).
class MerkleTree {
 public:
  MerkleTree() = default;
  std::size_t leaf_count() const { return n_; }
  std::size_t height() const { return levels_.empty() ? 0 : levels_.size() - 1; }
  MerkleRoot root() const { return {levels_.back().front()}; }

 private:
  friend MerkleTree mt_commit_hashes(std::vector<Digest> leaf_hashes);
  friend MerklePath mt_open(const MerkleTree& tree, std::size_t i);

  std::size_t n_ = 0;
  std::vector<std::vector<Digest>> levels_;
};

// EmptyInput for an empty leaf list.
MerkleTree mt_commit(const CommitParams& pp, const std::vector<Bytes>& leaves);
MerkleTree mt_commit_hashes(std::vector<Digest> leaf_hashes);
// IndexOutOfRange when i >= n.
MerklePath mt_open(const MerkleTree& tree, std::size_t i);
bool mt_verify(const CommitParams& pp, const MerkleRoot& root, std::size_t i, ByteView leaf,
               const MerklePath& path);
bool mt_verify_hash(const MerkleRoot& root, std::size_t i, const Digest& leaf_digest,
                    const MerklePath& path);

// Number of path steps for an n-leaf tree: max(1, ceil(log2 n)).
std::size_t merkle_height(std::size_t n);

}  // namespace privade::commit
