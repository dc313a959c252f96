#include "privade/numerics/layers.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "privade/common/errors.hpp"
#include "privade/common/wide.hpp"

namespace privade::numerics {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorCode::ShapeMismatch, msg);
}

std::int32_t narrow(std::int64_t v) {
  if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
    fail(ErrorCode::Overflow, "activation out of Q16.16 range");
  }
  return static_cast<std::int32_t>(v);
}

std::int32_t narrow(i128 v) {
  if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
    fail(ErrorCode::Overflow, "activation out of Q16.16 range");
  }
  return static_cast<std::int32_t>(v);
}

std::int64_t max_abs(std::span<const std::int32_t> v) {
  std::int64_t m = 0;
  for (std::int32_t x : v) m = std::max<std::int64_t>(m, x < 0 ? -std::int64_t{x} : std::int64_t{x});
  return m;
}

// True when a dot product of `fan_in` terms plus a shifted bias cannot leave int64.
bool fits_int64(std::int64_t max_w, std::int64_t max_x, std::size_t fan_in) {
  long double bound = static_cast<long double>(max_w) * static_cast<long double>(max_x) *
                          static_cast<long double>(fan_in) +
                      static_cast<long double>(std::int64_t{1} << 47);
  return bound < static_cast<long double>(std::int64_t{1} << 62);
}

std::size_t pool_stride(const LayerSpec& s) { return s.stride == 0 ? s.kernel : s.stride; }

template <typename Acc>
FixedTensor conv_impl(const LayerSpec& s, const FixedTensor& w, const FixedTensor& b,
                      const FixedTensor& x, const Shape& out_shape) {
  const std::size_t C = s.in_channels, O = s.out_channels, K = s.kernel;
  const std::size_t H = x.shape()[1], W = x.shape()[2];
  const std::size_t OH = out_shape[1], OW = out_shape[2];
  const std::size_t stride = s.stride == 0 ? 1 : s.stride;
  const auto pad = static_cast<std::ptrdiff_t>(s.padding);
  auto in = x.raw();
  auto wr = w.raw();
  auto br = b.raw();
  std::vector<std::int32_t> out(O * OH * OW);
  std::vector<Acc> acc(OH * OW);
  for (std::size_t o = 0; o < O; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<Acc>(br[o]) * static_cast<Acc>(kOneRaw));
    for (std::size_t c = 0; c < C; ++c) {
      const std::int32_t* plane = in.data() + c * H * W;
      for (std::size_t ky = 0; ky < K; ++ky) {
        for (std::size_t kx = 0; kx < K; ++kx) {
          const Acc wv = wr[((o * C + c) * K + ky) * K + kx];
          if (wv == 0) continue;
          for (std::size_t oy = 0; oy < OH; ++oy) {
            std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + ky) - pad;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
            const std::int32_t* row = plane + static_cast<std::size_t>(iy) * W;
            Acc* arow = acc.data() + oy * OW;
            for (std::size_t ox = 0; ox < OW; ++ox) {
              std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + kx) - pad;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
              arow[ox] += wv * static_cast<Acc>(row[ix]);
            }
          }
        }
      }
    }
    for (std::size_t p = 0; p < OH * OW; ++p) out[o * OH * OW + p] = narrow(acc[p] >> kFracBits);
  }
  return FixedTensor(out_shape, std::move(out));
}

template <typename Acc>
FixedTensor linear_impl(const LayerSpec& s, const FixedTensor& w, const FixedTensor& b,
                        const FixedTensor& x) {
  const std::size_t I = s.in_features, O = s.out_features;
  auto in = x.raw();
  auto wr = w.raw();
  auto br = b.raw();
  std::vector<std::int32_t> out(O);
  for (std::size_t o = 0; o < O; ++o) {
    Acc acc = static_cast<Acc>(br[o]) * static_cast<Acc>(kOneRaw);
    const std::int32_t* row = wr.data() + o * I;
    for (std::size_t i = 0; i < I; ++i) acc += static_cast<Acc>(row[i]) * static_cast<Acc>(in[i]);
    out[o] = narrow(acc >> kFracBits);
  }
  return FixedTensor({O}, std::move(out));
}

FixedTensor pool_impl(const LayerSpec& s, const FixedTensor& x, const Shape& out_shape, bool max) {
  const std::size_t C = x.shape()[0], H = x.shape()[1], W = x.shape()[2];
  const std::size_t OH = out_shape[1], OW = out_shape[2];
  const std::size_t K = s.kernel, stride = pool_stride(s);
  const auto area = static_cast<std::int64_t>(K * K);
  auto in = x.raw();
  std::vector<std::int32_t> out(C * OH * OW);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t oy = 0; oy < OH; ++oy) {
      for (std::size_t ox = 0; ox < OW; ++ox) {
        std::int64_t sum = 0;
        std::int32_t best = std::numeric_limits<std::int32_t>::min();
        for (std::size_t ky = 0; ky < K; ++ky) {
          for (std::size_t kx = 0; kx < K; ++kx) {
            std::int32_t v = in[(c * H + oy * stride + ky) * W + ox * stride + kx];
            sum += v;
            best = std::max(best, v);
          }
        }
        out[(c * OH + oy) * OW + ox] = max ? best : narrow(floor_div(sum, area));
      }
    }
  }
  return FixedTensor(out_shape, std::move(out));
}

FixedTensor adaptive_avg_impl(const FixedTensor& x, const Shape& out_shape) {
  const std::size_t C = x.shape()[0], H = x.shape()[1], W = x.shape()[2];
  const std::size_t OH = out_shape[1], OW = out_shape[2];
  auto in = x.raw();
  std::vector<std::int32_t> out(C * OH * OW);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t oy = 0; oy < OH; ++oy) {
      std::size_t y0 = oy * H / OH, y1 = ((oy + 1) * H + OH - 1) / OH;
      for (std::size_t ox = 0; ox < OW; ++ox) {
        std::size_t x0 = ox * W / OW, x1 = ((ox + 1) * W + OW - 1) / OW;
        std::int64_t sum = 0;
        for (std::size_t yy = y0; yy < y1; ++yy)
          for (std::size_t xx = x0; xx < x1; ++xx) sum += in[(c * H + yy) * W + xx];
        auto count = static_cast<std::int64_t>((y1 - y0) * (x1 - x0));
        out[(c * OH + oy) * OW + ox] = narrow(floor_div(sum, count));
      }
    }
  }
  return FixedTensor(out_shape, std::move(out));
}

FixedTensor batchnorm_impl(const BatchNormAffine& bn, const FixedTensor& x) {
  const std::size_t C = x.shape()[0];
  const std::size_t plane = x.size() / C;
  auto in = x.raw();
  std::vector<std::int32_t> out(x.size());
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t p = 0; p < plane; ++p) {
      std::int64_t v = (std::int64_t{in[c * plane + p]} * bn.scale[c]) >> kFracBits;
      out[c * plane + p] = narrow(v + bn.shift[c]);
    }
  }
  return FixedTensor(x.shape(), std::move(out));
}

FixedTensor evaluate(const LayerSpec& spec, const std::vector<FixedTensor>& params,
                     const BatchNormAffine* bn, std::int64_t max_w, const FixedTensor& input) {
  Shape out_shape = spec.output_shape(input.shape());
  switch (spec.kind) {
    case LayerKind::Conv2d: {
      std::size_t fan_in = spec.in_channels * spec.kernel * spec.kernel;
      if (fits_int64(max_w, max_abs(input.raw()), fan_in))
        return conv_impl<std::int64_t>(spec, params[0], params[1], input, out_shape);
      return conv_impl<i128>(spec, params[0], params[1], input, out_shape);
    }
    case LayerKind::Linear: {
      if (fits_int64(max_w, max_abs(input.raw()), spec.in_features))
        return linear_impl<std::int64_t>(spec, params[0], params[1], input);
      return linear_impl<i128>(spec, params[0], params[1], input);
    }
    case LayerKind::Relu: {
      std::vector<std::int32_t> out(input.raw().begin(), input.raw().end());
      for (auto& v : out) v = std::max(v, 0);
      return FixedTensor(out_shape, std::move(out));
    }
    case LayerKind::AvgPool2d: return pool_impl(spec, input, out_shape, false);
    case LayerKind::MaxPool2d: return pool_impl(spec, input, out_shape, true);
    case LayerKind::BatchNorm2d: return batchnorm_impl(*bn, input);
    case LayerKind::Flatten:
    case LayerKind::Dropout: return input.reshaped(out_shape);
    case LayerKind::AdaptiveAvgPool2d: return adaptive_avg_impl(input, out_shape);
  }
  fail(ErrorCode::ShapeMismatch, "unknown layer kind");
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::Linear: return "linear";
    case LayerKind::Relu: return "relu";
    case LayerKind::AvgPool2d: return "avgpool2d";
    case LayerKind::MaxPool2d: return "maxpool2d";
    case LayerKind::BatchNorm2d: return "batchnorm2d";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::AdaptiveAvgPool2d: return "adaptive-avgpool2d";
    case LayerKind::Dropout: return "dropout";
  }
  return "?";
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (LayerKind k : {LayerKind::Conv2d, LayerKind::Linear, LayerKind::Relu, LayerKind::AvgPool2d,
                      LayerKind::MaxPool2d, LayerKind::BatchNorm2d, LayerKind::Flatten,
                      LayerKind::AdaptiveAvgPool2d, LayerKind::Dropout}) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorCode::Malformed, "unknown layer kind '" + std::string(name) + "'");
}

LayerSpec LayerSpec::conv2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride,
                            std::size_t padding) {
  LayerSpec s;
  s.kind = LayerKind::Conv2d;
  s.in_channels = in;
  s.out_channels = out;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::linear(std::size_t in, std::size_t out) {
  LayerSpec s;
  s.kind = LayerKind::Linear;
  s.in_features = in;
  s.out_features = out;
  return s;
}

LayerSpec LayerSpec::avgpool2d(std::size_t kernel, std::size_t stride) {
  LayerSpec s;
  s.kind = LayerKind::AvgPool2d;
  s.kernel = kernel;
  s.stride = stride;
  return s;
}

LayerSpec LayerSpec::maxpool2d(std::size_t kernel, std::size_t stride) {
  LayerSpec s = avgpool2d(kernel, stride);
  s.kind = LayerKind::MaxPool2d;
  return s;
}

LayerSpec LayerSpec::batchnorm2d(std::size_t channels) {
  LayerSpec s;
  s.kind = LayerKind::BatchNorm2d;
  s.in_channels = channels;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::Flatten;
  return s;
}

LayerSpec LayerSpec::adaptive_avgpool2d(std::size_t out_h, std::size_t out_w) {
  LayerSpec s;
  s.kind = LayerKind::AdaptiveAvgPool2d;
  s.out_h = out_h;
  s.out_w = out_w;
  return s;
}

LayerSpec LayerSpec::dropout() {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  return s;
}

bool LayerSpec::parametric() const {
  return kind == LayerKind::Conv2d || kind == LayerKind::Linear || kind == LayerKind::BatchNorm2d;
}

std::vector<Shape> LayerSpec::param_shapes() const {
  switch (kind) {
    case LayerKind::Conv2d:
      return {{out_channels, in_channels, kernel, kernel}, {out_channels}};
    case LayerKind::Linear: return {{out_features, in_features}, {out_features}};
    case LayerKind::BatchNorm2d:
      return {{in_channels}, {in_channels}, {in_channels}, {in_channels}};
    default: return {};
  }
}

std::size_t LayerSpec::param_count() const {
  // batchnorm running statistics are buffers, not trainable parameters.
  if (kind == LayerKind::BatchNorm2d) return 2 * in_channels;
  std::size_t n = 0;
  for (const auto& s : param_shapes()) n += shape_size(s);
  return n;
}

Shape LayerSpec::output_shape(const Shape& in) const {
  const std::string where = std::string(to_string(kind)) + " on " + shape_to_string(in);
  switch (kind) {
    case LayerKind::Conv2d: {
      require(in.size() == 3 && in[0] == in_channels, where + ": channel mismatch");
      require(kernel > 0, where + ": kernel must be positive");
      std::size_t st = stride == 0 ? 1 : stride;
      require(in[1] + 2 * padding >= kernel && in[2] + 2 * padding >= kernel, where + ": input smaller than kernel");
      return {out_channels, (in[1] + 2 * padding - kernel) / st + 1, (in[2] + 2 * padding - kernel) / st + 1};
    }
    case LayerKind::Linear:
      require(in.size() == 1 && in[0] == in_features, where + ": feature mismatch");
      return {out_features};
    case LayerKind::Relu:
    case LayerKind::Dropout: return in;
    case LayerKind::AvgPool2d:
    case LayerKind::MaxPool2d: {
      require(in.size() == 3 && kernel > 0, where + ": expects [C,H,W] and kernel > 0");
      require(in[1] >= kernel && in[2] >= kernel, where + ": input smaller than kernel");
      std::size_t st = pool_stride(*this);
      return {in[0], (in[1] - kernel) / st + 1, (in[2] - kernel) / st + 1};
    }
    case LayerKind::BatchNorm2d:
      require(in.size() >= 1 && in[0] == in_channels, where + ": channel mismatch");
      return in;
    case LayerKind::Flatten: return {shape_size(in)};
    case LayerKind::AdaptiveAvgPool2d:
      require(in.size() == 3 && out_h > 0 && out_w > 0, where + ": expects [C,H,W]");
      return {in[0], out_h, out_w};
  }
  fail(ErrorCode::ShapeMismatch, where);
}

BatchNormAffine fold_batchnorm(const FixedTensor& gamma, const FixedTensor& beta,
                               const FixedTensor& mean, const FixedTensor& var) {
  const std::size_t C = gamma.size();
  BatchNormAffine out;
  out.scale.resize(C);
  out.shift.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    std::int64_t v = std::int64_t{var.raw()[c]} + kBatchNormEpsRaw;
    if (v <= 0) fail(ErrorCode::DomainError, "batchnorm variance must be non-negative");
    auto root = static_cast<std::int64_t>(isqrt(static_cast<u128>(v) << kFracBits));
    out.scale[c] = floor_div(std::int64_t{gamma.raw()[c]} * kOneRaw, root);
    out.shift[c] = std::int64_t{beta.raw()[c]} - ((std::int64_t{mean.raw()[c]} * out.scale[c]) >> kFracBits);
  }
  return out;
}

Layer::Layer(LayerSpec spec, std::vector<FixedTensor> params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  prepare();
}

void Layer::prepare() {
  auto shapes = spec_.param_shapes();
  if (params_.size() != shapes.size()) {
    fail(ErrorCode::ShapeMismatch, std::string(to_string(spec_.kind)) + ": expected " +
                                       std::to_string(shapes.size()) + " parameter tensors");
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (params_[i].shape() != shapes[i]) {
      fail(ErrorCode::ShapeMismatch, std::string(to_string(spec_.kind)) + ": parameter " +
                                         std::to_string(i) + " has shape " +
                                         shape_to_string(params_[i].shape()) + ", expected " +
                                         shape_to_string(shapes[i]));
    }
  }
  if (spec_.kind == LayerKind::BatchNorm2d) {
    bn_ = fold_batchnorm(params_[0], params_[1], params_[2], params_[3]);
  }
  if (spec_.mixing()) max_abs_weight_ = max_abs(params_[0].raw());
}

FixedTensor Layer::forward(const FixedTensor& input) const {
  return evaluate(spec_, params_, bn_ ? &*bn_ : nullptr, max_abs_weight_, input);
}

Bytes Layer::param_bytes() const {
  ByteWriter w;
  w.str(to_string(spec_.kind));
  w.u32_be(static_cast<std::uint32_t>(params_.size()));
  for (const auto& p : params_) p.write_to(w);
  return std::move(w).take();
}

FixedTensor layer_forward(const LayerSpec& spec, const std::vector<FixedTensor>& weights,
                          const FixedTensor& input) {
  return Layer(spec, weights).forward(input);
}

}  // namespace privade::numerics
