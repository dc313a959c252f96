#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "privade/common/bytes.hpp"
#include "privade/numerics/fixed.hpp"

namespace privade::numerics {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Row-major Q16.16 N-d array. Invariant: product(shape) == data size.
class FixedTensor {
 public:
  FixedTensor() = default;
  explicit FixedTensor(Shape shape);
  FixedTensor(Shape shape, std::vector<std::int32_t> raw);

  static FixedTensor from_doubles(Shape shape, std::span<const double> values);
  static FixedTensor from_scalars(Shape shape, std::span<const FixedScalar> values);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const std::int32_t> raw() const { return data_; }
  std::span<std::int32_t> raw() { return data_; }
  FixedScalar at(std::size_t flat) const { return FixedScalar::from_raw(data_.at(flat)); }
  void set(std::size_t flat, FixedScalar v) { data_.at(flat) = v.raw(); }
  std::vector<double> to_doubles() const;

  FixedTensor reshaped(Shape shape) const;

  // Tagged encoding: rank (u32 BE), dims (u32 BE each), raw int32 LE values.
  void write_to(ByteWriter& w) const;
  static FixedTensor read_from(ByteReader& r);
  Bytes serialize() const;
  static FixedTensor deserialize(ByteView bytes);

  friend bool operator==(const FixedTensor&, const FixedTensor&) = default;

 private:
  Shape shape_;
  std::vector<std::int32_t> data_;
};

}  // namespace privade::numerics
