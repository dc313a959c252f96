#include "privade/split/split_model.hpp"

#include <numeric>

#include "privade/common/drbg.hpp"
#include "privade/common/errors.hpp"

namespace privade::split {

using numerics::Layer;
using numerics::LayerKind;
using numerics::Shape;

namespace {

// Reorders slices along dimension 0: out[k] = in[perm[k]].
FixedTensor gather_rows(const FixedTensor& t, const std::vector<std::uint32_t>& perm) {
  std::size_t rows = t.shape().at(0);
  if (rows != perm.size()) fail(ErrorCode::ShapeMismatch, "permutation length mismatch");
  std::size_t stride = t.size() / rows;
  std::vector<std::int32_t> out(t.size());
  auto in = t.raw();
  for (std::size_t k = 0; k < rows; ++k) {
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(perm[k] * stride), stride,
                out.begin() + static_cast<std::ptrdiff_t>(k * stride));
  }
  return FixedTensor(t.shape(), std::move(out));
}

// Reorders slices along dimension 1: out[:, k] = in[:, perm[k]].
FixedTensor gather_cols(const FixedTensor& t, const std::vector<std::uint32_t>& perm) {
  const Shape& s = t.shape();
  std::size_t rows = s.at(0), cols = s.at(1);
  if (cols != perm.size()) fail(ErrorCode::ShapeMismatch, "permutation length mismatch");
  std::size_t inner = t.size() / (rows * cols);
  std::vector<std::int32_t> out(t.size());
  auto in = t.raw();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      std::copy_n(in.begin() + static_cast<std::ptrdiff_t>((r * cols + perm[k]) * inner), inner,
                  out.begin() + static_cast<std::ptrdiff_t>((r * cols + k) * inner));
    }
  }
  return FixedTensor(s, std::move(out));
}

void check_permutation(const std::vector<std::uint32_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::uint32_t p : perm) {
    if (p >= perm.size() || seen[p]) fail(ErrorCode::InvalidConfig, "mixer is not a permutation");
    seen[p] = true;
  }
}

std::size_t last_mixing_before(const Model& model, std::size_t end) {
  for (std::size_t l = end; l-- > 0;) {
    if (model.layer(l).spec().mixing()) return l;
  }
  fail(ErrorCode::InvalidCut, "block A has no conv2d/linear layer before its activation");
}

std::size_t mixer_width(const Model& model, std::size_t layer) {
  const auto& s = model.layer(layer).spec();
  return s.kind == LayerKind::Conv2d ? s.out_channels : s.out_features;
}

}  // namespace

const char* to_string(Block b) {
  switch (b) {
    case Block::A: return "A";
    case Block::B: return "B";
    case Block::C: return "C";
  }
  return "?";
}

const Model& SplitModel::block(Block blk) const {
  switch (blk) {
    case Block::A: return a;
    case Block::B: return b;
    case Block::C: return c;
  }
  return c;
}

std::size_t block_a_end(const Model& model) {
  for (std::size_t l = 0; l < model.size(); ++l) {
    if (model.layer(l).spec().kind == LayerKind::Relu) return l + 1;
  }
  fail(ErrorCode::InvalidCut, "model has no activation layer");
}

SplitModel split_model_with_permutation(const Model& model, std::size_t cut_bc,
                                        std::vector<std::uint32_t> perm) {
  const std::size_t L = model.size();
  const std::size_t a_end = block_a_end(model);
  if (cut_bc <= a_end || cut_bc >= L) {
    fail(ErrorCode::InvalidCut, "cut " + std::to_string(cut_bc) + " must lie in (" +
                                    std::to_string(a_end) + ", " + std::to_string(L) + ")");
  }
  const std::size_t head = last_mixing_before(model, a_end);
  if (perm.size() != mixer_width(model, head)) {
    fail(ErrorCode::InvalidConfig, "mixer width does not match block A output channels");
  }
  check_permutation(perm);

  std::vector<Layer> layers = model.layers();
  {
    const Layer& h = layers[head];
    layers[head] = Layer(h.spec(), {gather_rows(h.params()[0], perm), gather_rows(h.params()[1], perm)});
  }

  // Propagate the permutation until a layer mixes channels/features.
  std::vector<std::uint32_t> sigma = perm;
  std::size_t inverse_layer = L;
  for (std::size_t l = head + 1; l < L; ++l) {
    const Layer& cur = layers[l];
    const auto& spec = cur.spec();
    if (spec.kind == LayerKind::BatchNorm2d) {
      std::vector<FixedTensor> p;
      for (const auto& t : cur.params()) p.push_back(gather_rows(t, sigma));
      layers[l] = Layer(spec, std::move(p));
    } else if (spec.kind == LayerKind::Flatten) {
      const Shape& in = model.shapes()[l];
      std::size_t inner = numerics::shape_size(in) / in.at(0);
      std::vector<std::uint32_t> expanded(numerics::shape_size(in));
      for (std::size_t j = 0; j < expanded.size(); ++j) {
        expanded[j] = static_cast<std::uint32_t>(sigma[j / inner] * inner + j % inner);
      }
      sigma = std::move(expanded);
    } else if (spec.mixing()) {
      layers[l] = Layer(spec, {gather_cols(cur.params()[0], sigma), cur.params()[1]});
      inverse_layer = l;
      break;
    }
  }
  if (inverse_layer == L) fail(ErrorCode::InvalidCut, "no mixing layer after block A to absorb the mixer");

  Model folded(model.name(), model.input_shape(), std::move(layers));
  SplitModel s;
  s.a = folded.slice(0, a_end, "A");
  s.b = folded.slice(a_end, cut_bc, "B");
  s.c = folded.slice(cut_bc, L, "C");
  s.a_end = a_end;
  s.cut_bc = cut_bc;
  s.mixer = std::move(perm);
  s.inverse_layer = inverse_layer;
  s.b_output_mixed = inverse_layer >= cut_bc;
  return s;
}

SplitModel split_model(const Model& model, std::size_t cut_bc, ByteView mixer_seed) {
  std::size_t a_end = block_a_end(model);
  std::size_t width = mixer_width(model, last_mixing_before(model, a_end));
  Drbg rng = Drbg(mixer_seed).fork("mixer");
  return split_model_with_permutation(model, cut_bc, random_permutation(rng, width));
}

FixedTensor forward_block(Block blk, const SplitModel& model, const FixedTensor& input) {
  if (blk == Block::A) model.counter_->fetch_add(1);
  return model.block(blk).forward(input);
}

FixedTensor forward_split(const SplitModel& model, const FixedTensor& input) {
  FixedTensor a = forward_block(Block::A, model, input);
  FixedTensor b = forward_block(Block::B, model, a);
  return forward_block(Block::C, model, b);
}

FixedTensor permute_channels(const FixedTensor& t, const std::vector<std::uint32_t>& perm) {
  return gather_rows(t, perm);
}

ForwardTrace full_trace(const Model& block, const std::vector<FixedTensor>& inputs) {
  ForwardTrace tr;
  tr.levels.resize(block.size() + 1);
  for (auto& lvl : tr.levels) lvl.reserve(inputs.size());
  for (const auto& x : inputs) {
    auto t = block.trace(x);
    for (std::size_t l = 0; l < t.size(); ++l) tr.levels[l].push_back(std::move(t[l]));
  }
  return tr;
}

}  // namespace privade::split
