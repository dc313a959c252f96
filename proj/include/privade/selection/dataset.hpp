#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privade/common/bytes.hpp"
#include "privade/numerics/tensor.hpp"

namespace privade::selection {

using numerics::FixedTensor;
using numerics::Shape;

/// Features with one-hot labels. Invariant: xs.size() == ys.size(), uniform
/// feature shape, every ys[i] has num_classes entries.
struct Dataset {
  std::vector<FixedTensor> xs;
  std::vector<FixedTensor> ys;
  std::size_t num_classes = 0;

  std::size_t size() const { return xs.size(); }
  const Shape& feature_shape() const { return xs.front().shape(); }
  std::size_t class_of(std::size_t i) const;

  void add(FixedTensor x, std::size_t label);
  void validate() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

FixedTensor one_hot(std::size_t label, std::size_t classes);

// "PVDD", u32 LE version, u32 LE manifest length, JSON manifest, then per
// sample the features followed by the one-hot label, all int32 LE.
Bytes encode_dataset(const Dataset& ds);
Dataset decode_dataset(ByteView bytes);
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// Rows "label,f1,f2,..." with decimal features; '#' lines and a non-numeric
// header are skipped. Features become a 1-D tensor.
Dataset import_csv(const std::string& text, std::size_t num_classes = 0);

}  // namespace privade::selection
