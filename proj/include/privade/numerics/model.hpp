#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "privade/numerics/layers.hpp"
#include "privade/numerics/tensor.hpp"

namespace privade::numerics {

/// Split metadata carried in a model file.
struct SplitManifest {
  std::size_t a_end = 0;   // first layer index of block B
  std::size_t cut_bc = 0;  // first layer index of block C
  std::string mixer_seed_commitment;  // hex digest, empty when unset
};

/// Ordered layer list with a declared input shape. Shapes are validated at
/// construction, so forward() only fails on bad input or overflow.
class Model {
 public:
  Model() = default;
  Model(std::string name, Shape input_shape, std::vector<Layer> layers);

  const std::string& name() const { return name_; }
  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return shapes_.back(); }
  // shapes()[l] is the shape entering layer l; shapes()[size()] is the output.
  const std::vector<Shape>& shapes() const { return shapes_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t l) const { return layers_.at(l); }
  std::size_t size() const { return layers_.size(); }
  std::size_t param_count() const;

  FixedTensor forward(const FixedTensor& input) const;
  // a_0 = input, a_l = layer l-1 applied to a_{l-1}; returns size()+1 tensors.
  std::vector<FixedTensor> trace(const FixedTensor& input) const;

  // Layers [begin, end) as a standalone model.
  Model slice(std::size_t begin, std::size_t end, std::string name) const;

  std::optional<SplitManifest> split;

 private:
  std::string name_;
  Shape input_shape_;
  std::vector<Layer> layers_;
  std::vector<Shape> shapes_;
};

}  // namespace privade::numerics
