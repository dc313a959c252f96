#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privade/common/bytes.hpp"
#include "privade/numerics/tensor.hpp"

namespace privade::numerics {

enum class LayerKind {
  Conv2d,
  Linear,
  Relu,
  AvgPool2d,
  MaxPool2d,
  BatchNorm2d,
  Flatten,
  AdaptiveAvgPool2d,
  Dropout,
};

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

/// Hyperparameters for one layer. Only the fields relevant to `kind` are
/// meaningful; the rest stay zero.
struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  std::size_t in_channels = 0;   // conv2d; batchnorm2d channel count
  std::size_t out_channels = 0;  // conv2d
  std::size_t in_features = 0;   // linear
  std::size_t out_features = 0;  // linear
  std::size_t kernel = 0;        // conv2d, pools
  std::size_t stride = 0;        // conv2d, pools (0 = kernel for pools, 1 for conv)
  std::size_t padding = 0;       // conv2d
  std::size_t out_h = 0;         // adaptive-avgpool2d
  std::size_t out_w = 0;

  static LayerSpec conv2d(std::size_t in, std::size_t out, std::size_t kernel,
                          std::size_t stride = 1, std::size_t padding = 0);
  static LayerSpec linear(std::size_t in, std::size_t out);
  static LayerSpec relu() { return {}; }
  static LayerSpec avgpool2d(std::size_t kernel, std::size_t stride = 0);
  static LayerSpec maxpool2d(std::size_t kernel, std::size_t stride = 0);
  static LayerSpec batchnorm2d(std::size_t channels);
  static LayerSpec flatten();
  static LayerSpec adaptive_avgpool2d(std::size_t out_h, std::size_t out_w);
  static LayerSpec dropout();

  bool parametric() const;
  // Channel/feature-mixing layers: conv2d and linear.
  bool mixing() const { return kind == LayerKind::Conv2d || kind == LayerKind::Linear; }

  // Shapes of the stored parameter tensors (file form).
  std::vector<Shape> param_shapes() const;
  std::size_t param_count() const;

  // Output shape for a given input shape; ShapeMismatch when inconsistent.
  Shape output_shape(const Shape& input) const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

inline constexpr std::int32_t kBatchNormEpsRaw = 64;  // 2^-10 in Q16.16

/// Folded per-channel affine form of batchnorm2d: y = floor(x*scale/2^16) + shift.
struct BatchNormAffine {
  std::vector<std::int64_t> scale;
  std::vector<std::int64_t> shift;
};

// Folds (gamma, beta, mean, var) with eps = 2^-10.
BatchNormAffine fold_batchnorm(const FixedTensor& gamma, const FixedTensor& beta,
                               const FixedTensor& mean, const FixedTensor& var);

/// One layer with its stored parameters and any load-time precomputation.
class Layer {
 public:
  Layer(LayerSpec spec, std::vector<FixedTensor> params);

  const LayerSpec& spec() const { return spec_; }
  const std::vector<FixedTensor>& params() const { return params_; }

  FixedTensor forward(const FixedTensor& input) const;

  // Stored parameters serialized back to back; the per-layer weight leaf.
  Bytes param_bytes() const;

 private:
  void prepare();

  LayerSpec spec_;
  std::vector<FixedTensor> params_;
  std::optional<BatchNormAffine> bn_;
  std::int64_t max_abs_weight_ = 0;
};

// Stateless entry point: validates weights for the kind and evaluates.
FixedTensor layer_forward(const LayerSpec& spec, const std::vector<FixedTensor>& weights,
                          const FixedTensor& input);

}  // namespace privade::numerics
