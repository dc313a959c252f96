#include "privade/numerics/architectures.hpp"

#include <cmath>
#include <sstream>

#include "privade/common/errors.hpp"

namespace privade::numerics {

namespace {

FixedTensor uniform_tensor(Shape shape, std::int64_t bound_raw, Drbg& rng) {
  std::vector<std::int32_t> raw(shape_size(shape));
  auto span = static_cast<std::uint64_t>(2 * bound_raw + 1);
  for (auto& v : raw) v = static_cast<std::int32_t>(static_cast<std::int64_t>(rng.uniform(span)) - bound_raw);
  return FixedTensor(std::move(shape), std::move(raw));
}

FixedTensor offset_tensor(Shape shape, std::int64_t center_raw, std::int64_t bound_raw, Drbg& rng) {
  FixedTensor t = uniform_tensor(std::move(shape), bound_raw, rng);
  for (auto& v : t.raw()) v = static_cast<std::int32_t>(v + center_raw);
  return t;
}

Layer make(const LayerSpec& spec, Drbg& rng) { return Layer(spec, random_params(spec, rng)); }

Model assemble(std::string name, Shape input, const std::vector<LayerSpec>& specs, std::size_t a_end,
               std::size_t cut_bc, Drbg& rng) {
  std::vector<Layer> layers;
  layers.reserve(specs.size());
  for (const auto& s : specs) layers.push_back(make(s, rng));
  Model m(std::move(name), std::move(input), std::move(layers));
  m.split = SplitManifest{a_end, cut_bc, {}};
  return m;
}

}  // namespace

std::vector<FixedTensor> random_params(const LayerSpec& spec, Drbg& rng) {
  switch (spec.kind) {
    case LayerKind::Conv2d:
    case LayerKind::Linear: {
      auto shapes = spec.param_shapes();
      std::size_t fan_in = shape_size(shapes[0]) / shapes[0][0];
      auto bound = static_cast<std::int64_t>(std::floor(static_cast<double>(kOneRaw) /
                                                        std::sqrt(static_cast<double>(fan_in))));
      return {uniform_tensor(shapes[0], bound, rng), uniform_tensor(shapes[1], bound, rng)};
    }
    case LayerKind::BatchNorm2d: {
      Shape c{spec.in_channels};
      const std::int64_t half = kOneRaw / 2, tenth = kOneRaw / 10;
      return {offset_tensor(c, kOneRaw, half, rng), uniform_tensor(c, tenth, rng),
              uniform_tensor(c, tenth, rng), offset_tensor(c, kOneRaw, half, rng)};
    }
    default: return {};
  }
}

Model lenet_xs(Drbg& rng) {
  return assemble("lenet-xs", {1, 28, 28},
                  {LayerSpec::conv2d(1, 3, 5), LayerSpec::relu(), LayerSpec::avgpool2d(2),
                   LayerSpec::conv2d(3, 6, 5), LayerSpec::relu(), LayerSpec::avgpool2d(2),
                   LayerSpec::adaptive_avgpool2d(4, 4), LayerSpec::flatten(), LayerSpec::linear(96, 32),
                   LayerSpec::relu(), LayerSpec::linear(32, 10)},
                  2, 4, rng);
}

Model lenet5(Drbg& rng) {
  return assemble("lenet5", {1, 32, 32},
                  {LayerSpec::conv2d(1, 6, 5), LayerSpec::relu(), LayerSpec::avgpool2d(2),
                   LayerSpec::conv2d(6, 16, 5), LayerSpec::relu(), LayerSpec::avgpool2d(2),
                   LayerSpec::flatten(), LayerSpec::linear(400, 120), LayerSpec::relu(),
                   LayerSpec::linear(120, 84), LayerSpec::relu(), LayerSpec::linear(84, 10)},
                  2, 9, rng);
}

Model cnn5(Drbg& rng) {
  std::vector<LayerSpec> specs = {LayerSpec::conv2d(3, 32, 3, 1, 1), LayerSpec::relu(),
                                  LayerSpec::batchnorm2d(32), LayerSpec::maxpool2d(2)};
  std::size_t ch = 32;
  for (int block = 0; block < 4; ++block) {
    specs.push_back(LayerSpec::conv2d(ch, ch * 2, 3, 1, 1));
    specs.push_back(LayerSpec::relu());
    specs.push_back(LayerSpec::batchnorm2d(ch * 2));
    specs.push_back(LayerSpec::maxpool2d(2));
    ch *= 2;
  }
  for (const auto& s : {LayerSpec::flatten(), LayerSpec::dropout(), LayerSpec::linear(512, 256),
                        LayerSpec::relu(), LayerSpec::dropout(), LayerSpec::linear(256, 100)}) {
    specs.push_back(s);
  }
  return assemble("cnn5", {3, 32, 32}, specs, 2, 4, rng);
}

Model mlp(Drbg& rng, std::size_t inputs, std::size_t hidden, std::size_t classes) {
  return assemble("mlp:" + std::to_string(inputs) + ":" + std::to_string(hidden) + ":" + std::to_string(classes),
                  {inputs},
                  {LayerSpec::linear(inputs, hidden), LayerSpec::relu(), LayerSpec::linear(hidden, hidden),
                   LayerSpec::relu(), LayerSpec::linear(hidden, classes)},
                  2, 3, rng);
}

std::vector<std::string> architecture_names() { return {"lenet-xs", "lenet5", "cnn5"}; }

Model build_architecture(const std::string& name, Drbg& rng) {
  if (name == "lenet-xs") return lenet_xs(rng);
  if (name == "lenet5") return lenet5(rng);
  if (name == "cnn5") return cnn5(rng);
  if (name.rfind("mlp:", 0) == 0) {
    std::istringstream in(name.substr(4));
    std::size_t a = 0, b = 0, c = 0;
    char s1 = 0, s2 = 0;
    if ((in >> a >> s1 >> b >> s2 >> c) && s1 == ':' && s2 == ':' && a && b && c) return mlp(rng, a, b, c);
  }
  fail(ErrorCode::InvalidConfig, "unknown architecture '" + name + "'");
}

}  // namespace privade::numerics
