#pragma once

#include <string>

#include "privade/common/bytes.hpp"
#include "privade/numerics/model.hpp"

namespace privade::numerics {

// Container layout (docs/formats.md): "PVDM", u32 LE version, u32 LE manifest
// length, JSON manifest, then each layer's tensors as int32 LE in manifest order.
Bytes encode_model(const Model& model);
Model decode_model(ByteView bytes);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView bytes);

}  // namespace privade::numerics
