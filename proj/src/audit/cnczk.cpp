#include "privade/audit/cnczk.hpp"

#include <algorithm>

#include "privade/commit/records.hpp"
#include "privade/common/errors.hpp"

namespace privade::audit {

using commit::MerkleRoot;
using commit::MerkleTree;
using numerics::Layer;

namespace {

constexpr std::uint32_t kMaxCount = 1U << 24;

std::uint32_t read_count(ByteReader& r) {
  std::uint32_t n = r.u32_be();
  if (n > kMaxCount) fail(ErrorCode::Malformed, "count too large");
  return n;
}

void write_opening(ByteWriter& w, const LeafOpening& o) {
  w.blob(o.leaf);
  commit::write_record(w, o.path);
}

LeafOpening read_opening(ByteReader& r) {
  LeafOpening o;
  o.leaf = r.blob();
  o.path = commit::read_merkle_path(r);
  return o;
}

void write_optional_root(ByteWriter& w, const std::optional<MerkleRoot>& root) {
  w.u8(root ? 1 : 0);
  if (root) commit::write_record(w, *root);
}

std::optional<MerkleRoot> read_optional_root(ByteReader& r) {
  std::uint8_t f = r.u8();
  if (f > 1) fail(ErrorCode::Malformed, "bad optional flag");
  if (f == 0) return std::nullopt;
  return commit::read_merkle_root(r);
}

Variant read_variant(ByteReader& r) {
  std::uint8_t v = r.u8();
  if (v != 1 && v != 2) fail(ErrorCode::Malformed, "unknown CnCZK variant");
  return static_cast<Variant>(v);
}

std::vector<FixedTensor> decode_params(ByteView bytes, const numerics::LayerSpec& spec) {
  ByteReader r(bytes);
  if (r.str() != numerics::to_string(spec.kind)) fail(ErrorCode::Malformed, "weight leaf names another layer kind");
  std::uint32_t n = read_count(r);
  std::vector<FixedTensor> out;
  for (std::uint32_t k = 0; k < n; ++k) out.push_back(FixedTensor::read_from(r));
  r.expect_done();
  return out;
}

LeafOpening open_leaf(const MerkleTree& tree, std::size_t i, Bytes leaf) {
  return LeafOpening{std::move(leaf), commit::mt_open(tree, i)};
}

}  // namespace

const char* to_string(Variant v) {
  return v == Variant::HiddenWeights ? "hidden-weights" : "hidden-data";
}

void TraceCommitment::write_to(ByteWriter& w) const {
  w.u8(static_cast<std::uint8_t>(variant));
  w.u32_be(static_cast<std::uint32_t>(levels.size()));
  for (const auto& root : levels) commit::write_record(w, root);
  write_optional_root(w, weights_root);
  write_optional_root(w, data_root);
}

TraceCommitment TraceCommitment::read_from(ByteReader& r) {
  TraceCommitment t;
  t.variant = read_variant(r);
  std::uint32_t n = read_count(r);
  for (std::uint32_t k = 0; k < n; ++k) t.levels.push_back(commit::read_merkle_root(r));
  t.weights_root = read_optional_root(r);
  t.data_root = read_optional_root(r);
  return t;
}

Bytes activation_leaf(const FixedTensor& t) { return t.serialize(); }

MerkleTree tensor_tree(const std::vector<FixedTensor>& ts) {
  std::vector<Digest> hashes;
  hashes.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) hashes.push_back(commit::leaf_hash(i, activation_leaf(ts[i])));
  return commit::mt_commit_hashes(std::move(hashes));
}

MerkleTree weight_tree(const Model& block) {
  std::vector<Digest> hashes;
  for (std::size_t l = 0; l < block.size(); ++l) hashes.push_back(commit::leaf_hash(l, block.layer(l).param_bytes()));
  return commit::mt_commit_hashes(std::move(hashes));
}

CommittedTrace cnczk_commit_given_trace(const Model& block, split::ForwardTrace trace, Variant variant) {
  if (trace.points() == 0) fail(ErrorCode::EmptyInput, "CnCZK trace needs at least one input");
  if (trace.levels.size() != block.size() + 1) fail(ErrorCode::ShapeMismatch, "trace length does not match block");
  CommittedTrace c;
  c.trace = std::move(trace);
  c.pub.variant = variant;
  for (const auto& level : c.trace.levels) {
    c.level_trees.push_back(tensor_tree(level));
    c.pub.levels.push_back(c.level_trees.back().root());
  }
  if (variant == Variant::HiddenWeights) {
    for (std::size_t l = 0; l < block.size(); ++l) c.weight_leaves.push_back(block.layer(l).param_bytes());
    c.weight_tree = weight_tree(block);
    c.pub.weights_root = c.weight_tree->root();
  } else {
    c.data_tree = tensor_tree(c.trace.levels.front());
    c.pub.data_root = c.data_tree->root();
  }
  return c;
}

CommittedTrace cnczk_commit_trace(const Model& block, const std::vector<FixedTensor>& inputs, Variant variant) {
  return cnczk_commit_given_trace(block, split::full_trace(block, inputs), variant);
}

void Challenge::write_to(ByteWriter& w) const {
  w.u32_be(static_cast<std::uint32_t>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    w.u32_be(points[k]);
    w.u32_be(static_cast<std::uint32_t>(layers[k].size()));
    for (std::uint32_t l : layers[k]) w.u32_be(l);
  }
}

Challenge Challenge::read_from(ByteReader& r) {
  Challenge c;
  std::uint32_t n = read_count(r);
  for (std::uint32_t k = 0; k < n; ++k) {
    c.points.push_back(r.u32_be());
    std::uint32_t s = read_count(r);
    std::vector<std::uint32_t> ls;
    for (std::uint32_t j = 0; j < s; ++j) ls.push_back(r.u32_be());
    c.layers.push_back(std::move(ls));
  }
  return c;
}

Challenge cnczk_challenge(Drbg& verifier_rng, std::size_t N, std::size_t L, std::size_t m, std::size_t s) {
  if (m < 1 || m > N || s < 1 || s > L) {
    fail(ErrorCode::PlanInvalid, "challenge needs 1 <= m <= N and 1 <= s <= L");
  }
  Challenge c;
  auto pts = choose_distinct(verifier_rng, N, m);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i : pts) {
    c.points.push_back(static_cast<std::uint32_t>(i));
    auto ls = choose_distinct(verifier_rng, L, s);
    std::sort(ls.begin(), ls.end());
    std::vector<std::uint32_t> one_based;
    for (std::size_t l : ls) one_based.push_back(static_cast<std::uint32_t>(l + 1));
    c.layers.push_back(std::move(one_based));
  }
  return c;
}

void CnczkProof::write_to(ByteWriter& w) const {
  w.u8(static_cast<std::uint8_t>(variant));
  w.u8(backend);
  w.u32_be(static_cast<std::uint32_t>(transitions.size()));
  for (const auto& t : transitions) {
    w.u32_be(t.point);
    w.u32_be(t.layer);
    write_opening(w, t.before);
    write_opening(w, t.after);
    w.u8(t.weights ? 1 : 0);
    if (t.weights) write_opening(w, *t.weights);
  }
  w.u32_be(static_cast<std::uint32_t>(inputs.size()));
  for (const auto& p : inputs) {
    w.u32_be(p.point);
    write_opening(w, p.level0);
    write_opening(w, p.data);
    w.blob(p.commitment_randomness);
  }
}

CnczkProof CnczkProof::read_from(ByteReader& r) {
  CnczkProof p;
  p.variant = read_variant(r);
  p.backend = r.u8();
  std::uint32_t n = read_count(r);
  for (std::uint32_t k = 0; k < n; ++k) {
    TransitionProof t;
    t.point = r.u32_be();
    t.layer = r.u32_be();
    t.before = read_opening(r);
    t.after = read_opening(r);
    std::uint8_t f = r.u8();
    if (f > 1) fail(ErrorCode::Malformed, "bad optional flag");
    if (f) t.weights = read_opening(r);
    p.transitions.push_back(std::move(t));
  }
  std::uint32_t m = read_count(r);
  for (std::uint32_t k = 0; k < m; ++k) {
    InputProof ip;
    ip.point = r.u32_be();
    ip.level0 = read_opening(r);
    ip.data = read_opening(r);
    ip.commitment_randomness = r.blob();
    p.inputs.push_back(std::move(ip));
  }
  return p;
}

CnczkProof cnczk_prove(const CommittedTrace& c, const Challenge& challenge, const std::vector<Bytes>* input_randomness) {
  CnczkProof proof;
  proof.variant = c.pub.variant;
  const auto& levels = c.trace.levels;
  for (std::size_t k = 0; k < challenge.points.size(); ++k) {
    const std::size_t i = challenge.points[k];
    if (c.pub.variant == Variant::HiddenData) {
      InputProof ip;
      ip.point = static_cast<std::uint32_t>(i);
      Bytes leaf = activation_leaf(levels[0].at(i));
      ip.level0 = open_leaf(c.level_trees[0], i, leaf);
      ip.data = open_leaf(*c.data_tree, i, std::move(leaf));
      if (input_randomness) ip.commitment_randomness = input_randomness->at(i);
      proof.inputs.push_back(std::move(ip));
    }
    for (std::uint32_t l : challenge.layers[k]) {
      if (l == 0 || l >= levels.size()) fail(ErrorCode::PlanInvalid, "challenged layer out of range");
      TransitionProof t;
      t.point = static_cast<std::uint32_t>(i);
      t.layer = l;
      t.before = open_leaf(c.level_trees[l - 1], i, activation_leaf(levels[l - 1].at(i)));
      t.after = open_leaf(c.level_trees[l], i, activation_leaf(levels[l].at(i)));
      if (c.pub.variant == Variant::HiddenWeights) {
        t.weights = open_leaf(*c.weight_tree, l - 1, c.weight_leaves.at(l - 1));
      }
      proof.transitions.push_back(std::move(t));
    }
  }
  return proof;
}

VerifierView verifier_view(const Model& block, Variant variant, std::size_t points) {
  VerifierView v;
  v.variant = variant;
  v.points = points;
  v.shapes = block.shapes();
  for (const Layer& l : block.layers()) {
    v.specs.push_back(l.spec());
    v.public_params.push_back(variant == Variant::HiddenData ? l.params() : std::vector<FixedTensor>{});
  }
  return v;
}

CnczkVerdict cnczk_verify(const commit::CommitParams& pp, const TraceCommitment& roots, const Challenge& challenge,
                          const CnczkProof& proof, const VerifierView& view) {
  CnczkVerdict verdict;
  auto reject = [&](std::size_t i, std::size_t l, std::string why) {
    verdict.accepted = false;
    verdict.failure = std::make_pair(i, l);
    verdict.reason = std::move(why);
    return verdict;
  };
  const std::size_t L = view.specs.size();

  if (roots.variant != view.variant || proof.variant != view.variant) return reject(0, 0, "variant mismatch");
  if (proof.backend != kTransparentBackend) return reject(0, 0, "unsupported proof backend");
  if (roots.levels.size() != L + 1) return reject(0, 0, "wrong number of level roots");
  if (challenge.points.size() != challenge.layers.size()) return reject(0, 0, "malformed challenge");

  if (view.variant == Variant::HiddenWeights) {
    if (!roots.weights_root) return reject(0, 0, "missing weights root");
    if (view.weights_commitment &&
        !commit::open(pp, *view.weights_commitment, privade::view(roots.weights_root->digest),
                      view.weights_commitment_randomness)) {
      return reject(0, 0, "weights root does not open the model commitment");
    }
    if (view.public_inputs && tensor_tree(*view.public_inputs).root() != roots.levels.front()) {
      return reject(0, 0, "R_0 does not commit to the public inputs");
    }
  } else {
    if (!roots.data_root) return reject(0, 0, "missing data root");
    if (view.public_outputs && tensor_tree(*view.public_outputs).root() != roots.levels.back()) {
      return reject(0, L, "R_L does not commit to the public outputs");
    }
  }

  // Expected proofs in challenge order.
  std::size_t next_transition = 0, next_input = 0;
  for (std::size_t k = 0; k < challenge.points.size(); ++k) {
    const std::size_t i = challenge.points[k];
    if (i >= view.points) return reject(i, 0, "challenged point out of range");

    if (view.variant == Variant::HiddenData) {
      if (next_input >= proof.inputs.size()) return reject(i, 0, "missing input proof");
      const InputProof& ip = proof.inputs[next_input++];
      if (ip.point != i) return reject(i, 0, "input proof for wrong point");
      if (ip.level0.leaf != ip.data.leaf) return reject(i, 0, "R_0 leaf differs from R_X leaf");
      if (!commit::mt_verify(pp, roots.levels[0], i, ip.level0.leaf, ip.level0.path))
        return reject(i, 0, "R_0 opening fails");
      if (!commit::mt_verify(pp, *roots.data_root, i, ip.data.leaf, ip.data.path))
        return reject(i, 0, "R_X opening fails");
      if (view.input_commitments &&
          !commit::open(pp, view.input_commitments->at(i), ip.data.leaf, ip.commitment_randomness)) {
        return reject(i, 0, "input does not open its commitment");
      }
    }

    for (std::uint32_t l : challenge.layers[k]) {
      if (l == 0 || l > L) return reject(i, l, "challenged layer out of range");
      if (next_transition >= proof.transitions.size()) return reject(i, l, "missing transition proof");
      const TransitionProof& t = proof.transitions[next_transition++];
      if (t.point != i || t.layer != l) return reject(i, l, "transition proof out of order");
      if (!commit::mt_verify(pp, roots.levels[l - 1], i, t.before.leaf, t.before.path))
        return reject(i, l, "input activation opening fails");
      if (!commit::mt_verify(pp, roots.levels[l], i, t.after.leaf, t.after.path))
        return reject(i, l, "output activation opening fails");
      try {
        std::vector<FixedTensor> params;
        if (view.variant == Variant::HiddenWeights) {
          if (!t.weights) return reject(i, l, "missing weight opening");
          if (!commit::mt_verify(pp, *roots.weights_root, l - 1, t.weights->leaf, t.weights->path))
            return reject(i, l, "weight opening fails");
          params = decode_params(t.weights->leaf, view.specs[l - 1]);
        } else {
          params = view.public_params.at(l - 1);
        }
        FixedTensor before = FixedTensor::deserialize(t.before.leaf);
        FixedTensor after = FixedTensor::deserialize(t.after.leaf);
        if (before.shape() != view.shapes.at(l - 1) || after.shape() != view.shapes.at(l))
          return reject(i, l, "activation shape mismatch");
        if (Layer(view.specs[l - 1], std::move(params)).forward(before) != after)
          return reject(i, l, "transition does not recompute");
      } catch (const Error& e) {
        return reject(i, l, std::string("transition check raised ") + e.what());
      }
    }
  }
  if (next_transition != proof.transitions.size() || next_input != proof.inputs.size()) {
    return reject(0, 0, "proof contains unrequested openings");
  }
  verdict.accepted = true;
  return verdict;
}

}  // namespace privade::audit
