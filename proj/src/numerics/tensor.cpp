#include "privade/numerics/tensor.hpp"

#include "privade/common/errors.hpp"

namespace privade::numerics {

namespace {
constexpr std::uint32_t kMaxRank = 8;
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

FixedTensor::FixedTensor(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_), 0) {}

FixedTensor::FixedTensor(Shape shape, std::vector<std::int32_t> raw)
    : shape_(std::move(shape)), data_(std::move(raw)) {
  if (shape_size(shape_) != data_.size()) {
    fail(ErrorCode::ShapeMismatch, "shape " + shape_to_string(shape_) + " does not match " +
                                       std::to_string(data_.size()) + " elements");
  }
}

FixedTensor FixedTensor::from_doubles(Shape shape, std::span<const double> values) {
  std::vector<std::int32_t> raw;
  raw.reserve(values.size());
  for (double v : values) raw.push_back(FixedScalar::from_double(v).raw());
  return FixedTensor(std::move(shape), std::move(raw));
}

FixedTensor FixedTensor::from_scalars(Shape shape, std::span<const FixedScalar> values) {
  std::vector<std::int32_t> raw;
  raw.reserve(values.size());
  for (FixedScalar v : values) raw.push_back(v.raw());
  return FixedTensor(std::move(shape), std::move(raw));
}

std::vector<double> FixedTensor::to_doubles() const {
  std::vector<double> out;
  out.reserve(data_.size());
  for (std::int32_t r : data_) out.push_back(FixedScalar::from_raw(r).to_double());
  return out;
}

FixedTensor FixedTensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    fail(ErrorCode::ShapeMismatch, "cannot reshape " + shape_to_string(shape_) + " to " +
                                       shape_to_string(shape));
  }
  return FixedTensor(std::move(shape), data_);
}

void FixedTensor::write_to(ByteWriter& w) const {
  w.u32_be(static_cast<std::uint32_t>(shape_.size()));
  for (std::size_t d : shape_) w.u32_be(static_cast<std::uint32_t>(d));
  for (std::int32_t v : data_) w.i32_le(v);
}

FixedTensor FixedTensor::read_from(ByteReader& r) {
  std::uint32_t rank = r.u32_be();
  if (rank > kMaxRank) fail(ErrorCode::Malformed, "tensor rank too large");
  Shape shape(rank);
  std::size_t n = 1;
  for (auto& d : shape) {
    d = r.u32_be();
    n *= d;
    if (n > r.remaining() / 4 + 1) fail(ErrorCode::Malformed, "tensor larger than record");
  }
  if (n * 4 > r.remaining()) fail(ErrorCode::Malformed, "truncated tensor");
  std::vector<std::int32_t> raw(n);
  for (auto& v : raw) v = r.i32_le();
  return FixedTensor(std::move(shape), std::move(raw));
}

Bytes FixedTensor::serialize() const {
  ByteWriter w;
  write_to(w);
  return std::move(w).take();
}

FixedTensor FixedTensor::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  FixedTensor t = read_from(r);
  r.expect_done();
  return t;
}

}  // namespace privade::numerics
