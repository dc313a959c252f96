#include "privade/commit/merkle.hpp"

#include "privade/common/errors.hpp"

namespace privade::commit {

Digest leaf_hash(std::uint64_t index, ByteView message) {
  std::array<std::uint8_t, 8> enc{};
  for (int b = 0; b < 8; ++b) enc[b] = static_cast<std::uint8_t>(index >> (56 - 8 * b));
  Sha256 h;
  h.update(kLeafTag).update(ByteView(enc.data(), enc.size())).update(message);
  return h.finish();
}

Digest node_hash(const Digest& left, const Digest& right) {
  Sha256 h;
  h.update(kNodeTag).update(view(left)).update(view(right));
  return h.finish();
}

const Digest& pad_leaf() {
  static const Digest pad = sha256(as_bytes("privade/merkle/pad-leaf"));
  return pad;
}

std::size_t merkle_height(std::size_t n) {
  std::size_t h = 1;
  while ((std::size_t{1} << h) < n) ++h;
  return h;
}

MerkleTree mt_commit_hashes(std::vector<Digest> leaf_hashes) {
  if (leaf_hashes.empty()) fail(ErrorCode::EmptyInput, "Merkle tree needs at least one leaf");
  MerkleTree t;
  t.n_ = leaf_hashes.size();
  std::size_t width = std::size_t{1} << merkle_height(t.n_);
  leaf_hashes.resize(width, pad_leaf());
  t.levels_.push_back(std::move(leaf_hashes));
  while (t.levels_.back().size() > 1) {
    const auto& below = t.levels_.back();
    std::vector<Digest> up(below.size() / 2);
    for (std::size_t j = 0; j < up.size(); ++j) up[j] = node_hash(below[2 * j], below[2 * j + 1]);
    t.levels_.push_back(std::move(up));
  }
  return t;
}

MerkleTree mt_commit(const CommitParams&, const std::vector<Bytes>& leaves) {
  std::vector<Digest> hashes;
  hashes.reserve(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) hashes.push_back(leaf_hash(i, leaves[i]));
  return mt_commit_hashes(std::move(hashes));
}

MerklePath mt_open(const MerkleTree& tree, std::size_t i) {
  if (i >= tree.n_) {
    fail(ErrorCode::IndexOutOfRange, "leaf " + std::to_string(i) + " of " + std::to_string(tree.n_));
  }
  MerklePath p;
  p.index = i;
  std::size_t pos = i;
  for (std::size_t lvl = 0; lvl + 1 < tree.levels_.size(); ++lvl) {
    std::size_t sib = pos ^ 1U;
    p.steps.push_back({tree.levels_[lvl][sib], (pos & 1U) ? Side::Left : Side::Right});
    pos >>= 1;
  }
  return p;
}

bool mt_verify_hash(const MerkleRoot& root, std::size_t i, const Digest& leaf_digest,
                    const MerklePath& path) {
  if (path.index != i || path.steps.empty() || path.steps.size() >= 64) return false;
  if ((static_cast<std::uint64_t>(i) >> path.steps.size()) != 0) return false;
  Digest acc = leaf_digest;
  std::size_t pos = i;
  for (const PathStep& s : path.steps) {
    Side expected = (pos & 1U) ? Side::Left : Side::Right;
    if (s.side != expected) return false;
    acc = s.side == Side::Left ? node_hash(s.sibling, acc) : node_hash(acc, s.sibling);
    pos >>= 1;
  }
  return acc == root.digest;
}

bool mt_verify(const CommitParams&, const MerkleRoot& root, std::size_t i, ByteView leaf,
               const MerklePath& path) {
  return mt_verify_hash(root, i, leaf_hash(i, leaf), path);
}

}  // namespace privade::commit
