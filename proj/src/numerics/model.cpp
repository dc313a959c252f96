#include "privade/numerics/model.hpp"

#include "privade/common/errors.hpp"

namespace privade::numerics {

Model::Model(std::string name, Shape input_shape, std::vector<Layer> layers)
    : name_(std::move(name)), input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
  shapes_.reserve(layers_.size() + 1);
  shapes_.push_back(input_shape_);
  for (const Layer& l : layers_) shapes_.push_back(l.spec().output_shape(shapes_.back()));
}

std::size_t Model::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.spec().param_count();
  return n;
}

FixedTensor Model::forward(const FixedTensor& input) const {
  if (input.shape() != input_shape_) {
    fail(ErrorCode::ShapeMismatch, name_ + ": input shape " + shape_to_string(input.shape()) +
                                       ", expected " + shape_to_string(input_shape_));
  }
  FixedTensor a = input;
  for (const Layer& l : layers_) a = l.forward(a);
  return a;
}

std::vector<FixedTensor> Model::trace(const FixedTensor& input) const {
  if (input.shape() != input_shape_) {
    fail(ErrorCode::ShapeMismatch, name_ + ": input shape " + shape_to_string(input.shape()) +
                                       ", expected " + shape_to_string(input_shape_));
  }
  std::vector<FixedTensor> out;
  out.reserve(layers_.size() + 1);
  out.push_back(input);
  for (const Layer& l : layers_) out.push_back(l.forward(out.back()));
  return out;
}

Model Model::slice(std::size_t begin, std::size_t end, std::string name) const {
  if (begin > end || end > layers_.size()) fail(ErrorCode::IndexOutOfRange, "bad layer slice");
  std::vector<Layer> part(layers_.begin() + static_cast<std::ptrdiff_t>(begin),
                          layers_.begin() + static_cast<std::ptrdiff_t>(end));
  return Model(std::move(name), shapes_[begin], std::move(part));
}

}  // namespace privade::numerics
