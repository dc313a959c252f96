#include "privade/numerics/model_io.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "privade/common/errors.hpp"

namespace privade::numerics {

namespace {

constexpr char kMagic[4] = {'P', 'V', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

const char* const kConvNames[] = {"weight", "bias"};
const char* const kBnNames[] = {"gamma", "beta", "running_mean", "running_var"};

const char* tensor_name(LayerKind kind, std::size_t i) {
  return kind == LayerKind::BatchNorm2d ? kBnNames[i] : kConvNames[i];
}

nlohmann::json spec_to_json(const LayerSpec& s) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(s.kind));
  switch (s.kind) {
    case LayerKind::Conv2d:
      j["in_channels"] = s.in_channels;
      j["out_channels"] = s.out_channels;
      j["kernel"] = s.kernel;
      j["stride"] = s.stride == 0 ? 1 : s.stride;
      j["padding"] = s.padding;
      break;
    case LayerKind::Linear:
      j["in_features"] = s.in_features;
      j["out_features"] = s.out_features;
      break;
    case LayerKind::AvgPool2d:
    case LayerKind::MaxPool2d:
      j["kernel"] = s.kernel;
      j["stride"] = s.stride == 0 ? s.kernel : s.stride;
      break;
    case LayerKind::BatchNorm2d:
      j["channels"] = s.in_channels;
      j["eps_raw"] = kBatchNormEpsRaw;
      break;
    case LayerKind::AdaptiveAvgPool2d:
      j["out_h"] = s.out_h;
      j["out_w"] = s.out_w;
      break;
    default: break;
  }
  return j;
}

LayerSpec spec_from_json(const nlohmann::json& j) {
  LayerSpec s;
  s.kind = layer_kind_from_string(j.at("kind").get<std::string>());
  auto get = [&](const char* key) { return j.at(key).get<std::size_t>(); };
  switch (s.kind) {
    case LayerKind::Conv2d:
      s = LayerSpec::conv2d(get("in_channels"), get("out_channels"), get("kernel"), get("stride"),
                            get("padding"));
      break;
    case LayerKind::Linear: s = LayerSpec::linear(get("in_features"), get("out_features")); break;
    case LayerKind::AvgPool2d: s = LayerSpec::avgpool2d(get("kernel"), get("stride")); break;
    case LayerKind::MaxPool2d: s = LayerSpec::maxpool2d(get("kernel"), get("stride")); break;
    case LayerKind::BatchNorm2d:
      s = LayerSpec::batchnorm2d(get("channels"));
      if (j.contains("eps_raw") && j["eps_raw"].get<std::int64_t>() != kBatchNormEpsRaw) {
        fail(ErrorCode::Malformed, "batchnorm eps must be 2^-10");
      }
      break;
    case LayerKind::AdaptiveAvgPool2d: s = LayerSpec::adaptive_avgpool2d(get("out_h"), get("out_w")); break;
    default: break;
  }
  return s;
}

}  // namespace

Bytes encode_model(const Model& model) {
  nlohmann::json manifest;
  manifest["name"] = model.name();
  manifest["qformat"] = "Q16.16";
  manifest["input_shape"] = model.input_shape();
  manifest["layers"] = nlohmann::json::array();
  for (const Layer& l : model.layers()) {
    nlohmann::json j = spec_to_json(l.spec());
    j["tensors"] = nlohmann::json::array();
    for (std::size_t i = 0; i < l.params().size(); ++i) {
      j["tensors"].push_back({{"name", tensor_name(l.spec().kind, i)}, {"shape", l.params()[i].shape()}});
    }
    manifest["layers"].push_back(j);
  }
  if (model.split) {
    manifest["split"] = {{"a_end", model.split->a_end},
                         {"cut_bc", model.split->cut_bc},
                         {"mixer_seed_commitment", model.split->mixer_seed_commitment}};
  }
  std::string text = manifest.dump();

  ByteWriter w;
  w.raw(as_bytes(std::string_view(kMagic, 4)));
  w.u32_le(kVersion);
  w.u32_le(static_cast<std::uint32_t>(text.size()));
  w.raw(as_bytes(text));
  for (const Layer& l : model.layers()) {
    for (const auto& t : l.params()) {
      for (std::int32_t v : t.raw()) w.i32_le(v);
    }
  }
  return std::move(w).take();
}

Model decode_model(ByteView bytes) {
  ByteReader r(bytes);
  ByteView magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) fail(ErrorCode::Malformed, "not a model file");
  if (r.u32_le() != kVersion) fail(ErrorCode::Malformed, "unsupported model file version");
  std::uint32_t len = r.u32_le();
  ByteView text = r.raw(len);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text.begin(), text.end());
    if (manifest.at("qformat").get<std::string>() != "Q16.16") {
      fail(ErrorCode::Malformed, "unsupported qformat");
    }
    auto input_shape = manifest.at("input_shape").get<Shape>();
    std::vector<Layer> layers;
    for (const auto& jl : manifest.at("layers")) {
      LayerSpec spec = spec_from_json(jl);
      std::vector<FixedTensor> params;
      for (const auto& jt : jl.at("tensors")) {
        auto shape = jt.at("shape").get<Shape>();
        std::size_t n = shape_size(shape);
        if (n * 4 > r.remaining()) fail(ErrorCode::Malformed, "truncated weight buffer");
        std::vector<std::int32_t> raw(n);
        for (auto& v : raw) v = r.i32_le();
        params.emplace_back(std::move(shape), std::move(raw));
      }
      layers.emplace_back(spec, std::move(params));
    }
    r.expect_done();
    Model model(manifest.value("name", std::string("model")), std::move(input_shape), std::move(layers));
    if (manifest.contains("split")) {
      const auto& js = manifest["split"];
      model.split = SplitManifest{js.at("a_end").get<std::size_t>(), js.at("cut_bc").get<std::size_t>(),
                                  js.value("mixer_seed_commitment", std::string())};
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Malformed, std::string("model manifest: ") + e.what());
  }
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

void save_model(const Model& model, const std::string& path) { write_file(path, encode_model(model)); }

Model load_model(const std::string& path) { return decode_model(read_file(path)); }

}  // namespace privade::numerics
