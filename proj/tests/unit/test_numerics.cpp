#include <doctest.h>

#include <cmath>
#include <vector>

#include "privade/common/drbg.hpp"
#include "privade/common/errors.hpp"
#include "privade/numerics/architectures.hpp"
#include "privade/numerics/layers.hpp"
#include "privade/numerics/math.hpp"
#include "privade/numerics/model_io.hpp"

using namespace privade;
using namespace privade::numerics;

namespace {

FixedTensor tensor(Shape shape, std::vector<double> v) { return FixedTensor::from_doubles(std::move(shape), v); }

constexpr double kLsb = 1.0 / 65536.0;

FixedTensor random_tensor(Drbg& rng, Shape shape, std::int64_t bound_raw) {
  std::vector<std::int32_t> raw(shape_size(shape));
  for (auto& r : raw) r = static_cast<std::int32_t>(static_cast<std::int64_t>(rng.uniform(2 * bound_raw + 1)) - bound_raw);
  return FixedTensor(std::move(shape), std::move(raw));
}

}  // namespace

TEST_CASE("scalar arithmetic floors and rejects overflow") {
  auto a = FixedScalar::from_double(1.5);
  auto b = FixedScalar::from_double(-2.25);
  CHECK((a + b).to_double() == -0.75);
  CHECK((a * b).to_double() == -3.375);
  // floor toward negative infinity: -1 LSB * 0.5 = -0.5 LSB -> -1 LSB
  CHECK((FixedScalar::from_raw(-1) * FixedScalar::from_double(0.5)).raw() == -1);
  CHECK((FixedScalar::from_raw(1) * FixedScalar::from_double(0.5)).raw() == 0);
  auto big = FixedScalar::from_raw(INT32_MAX);
  CHECK_THROWS_AS(big + FixedScalar::one(), Error);
  CHECK_THROWS_AS(big * FixedScalar::from_int(2), Error);
}

TEST_CASE("relu, identity linear, conv shape and constant pooling") {
  auto relu = layer_forward(LayerSpec::relu(), {}, tensor({3}, {-1.0, 0.0, 2.5}));
  CHECK(relu == tensor({3}, {0.0, 0.0, 2.5}));

  auto eye = tensor({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  auto v = tensor({3}, {0.5, -7.25, 3.0});
  CHECK(layer_forward(LayerSpec::linear(3, 3), {eye, FixedTensor({3})}, v) == v);

  Drbg rng(7);
  auto spec = LayerSpec::conv2d(1, 3, 5);
  auto out = layer_forward(spec, random_params(spec, rng), FixedTensor({1, 28, 28}));
  CHECK(out.shape() == Shape{3, 24, 24});

  std::vector<double> c(16, 1.625);
  auto pooled = layer_forward(LayerSpec::avgpool2d(2), {}, tensor({1, 4, 4}, c));
  CHECK(pooled == tensor({1, 2, 2}, {1.625, 1.625, 1.625, 1.625}));
}

TEST_CASE("linear and conv without bias are additive") {
  Drbg rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto lin = LayerSpec::linear(8, 5);
    auto w = random_tensor(rng, {5, 8}, kOneRaw);
    auto a = random_tensor(rng, {8}, 4 * kOneRaw);
    auto b = random_tensor(rng, {8}, 4 * kOneRaw);
    FixedTensor sum({8});
    for (std::size_t i = 0; i < 8; ++i) sum.set(i, a.at(i) + b.at(i));
    FixedTensor zero_bias({5});
    auto fa = layer_forward(lin, {w, zero_bias}, a);
    auto fb = layer_forward(lin, {w, zero_bias}, b);
    auto fs = layer_forward(lin, {w, zero_bias}, sum);
    // One floor per output: the sum of two floored values may sit one LSB below.
    for (std::size_t i = 0; i < 5; ++i) {
      auto diff = fs.at(i).raw() - (fa.at(i) + fb.at(i)).raw();
      CHECK(diff >= 0);
      CHECK(diff <= 1);
    }
  }
  // Integer weights make every product exact, so additivity is exact.
  auto conv = LayerSpec::conv2d(2, 3, 3);
  auto w = random_tensor(rng, {3, 2, 3, 3}, 2);
  for (auto& r : w.raw()) r *= static_cast<std::int32_t>(kOneRaw);
  auto a = random_tensor(rng, {2, 6, 6}, kOneRaw);
  auto b = random_tensor(rng, {2, 6, 6}, kOneRaw);
  FixedTensor sum({2, 6, 6});
  for (std::size_t i = 0; i < sum.size(); ++i) sum.set(i, a.at(i) + b.at(i));
  auto fa = layer_forward(conv, {w, FixedTensor({3})}, a);
  auto fb = layer_forward(conv, {w, FixedTensor({3})}, b);
  auto fs = layer_forward(conv, {w, FixedTensor({3})}, sum);
  for (std::size_t i = 0; i < fs.size(); ++i) CHECK(fs.at(i) == fa.at(i) + fb.at(i));
}

TEST_CASE("softmax examples") {
  auto u = fx_softmax(tensor({4}, {0, 0, 0, 0}));
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(u.at(i).to_double() - 0.25) <= std::ldexp(1.0, -12));
  CHECK(fx_softmax(tensor({1}, {5.0})).at(0) == FixedScalar::one());
  auto p = fx_softmax(tensor({2}, {2.0, 0.0}));
  long double e2 = std::exp(2.0L);
  CHECK(std::abs(p.at(0).to_double() - static_cast<double>(e2 / (e2 + 1.0L))) <= std::ldexp(1.0, -8));
  CHECK(std::abs(p.at(1).to_double() - static_cast<double>(1.0L / (e2 + 1.0L))) <= std::ldexp(1.0, -8));
}

TEST_CASE("softmax normalization and argmax agree with a long-double oracle") {
  Drbg rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 2 + rng.uniform(9);
    auto logits = random_tensor(rng, {n}, 8 * kOneRaw);
    auto p = fx_softmax(logits);
    std::int64_t total = 0;
    for (auto r : p.raw()) total += r;
    CHECK(total == kOneRaw);

    std::vector<long double> ref(n);
    long double z = 0;
    for (std::size_t i = 0; i < n; ++i) z += ref[i] = std::exp(static_cast<long double>(logits.at(i).to_double()));
    std::size_t best = 0, second = 1;
    if (ref[1] > ref[0]) std::swap(best, second);
    for (std::size_t i = 0; i < n; ++i) {
      ref[i] /= z;
      CHECK(std::abs(p.at(i).to_double() - static_cast<double>(ref[i])) <= std::ldexp(1.0, -8));
    }
    for (std::size_t i = 2; i < n; ++i) {
      if (ref[i] > ref[best]) {
        second = best;
        best = i;
      } else if (ref[i] > ref[second]) {
        second = i;
      }
    }
    if (ref[best] - ref[second] > std::ldexp(1.0L, -7)) {
      std::size_t got = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (p.at(i) > p.at(got)) got = i;
      }
      CHECK(got == best);
    }
  }
}

TEST_CASE("ln and exp") {
  CHECK(std::abs(fx_ln(FixedScalar::one()).to_double()) <= std::ldexp(1.0, -8));
  CHECK(std::abs(fx_ln(FixedScalar::from_double(2.718281828459045)).to_double() - 1.0) <= std::ldexp(1.0, -7));
  CHECK_THROWS_AS(fx_ln(FixedScalar::zero()), Error);
  CHECK_THROWS_AS(fx_ln(FixedScalar::from_double(-1.0)), Error);
  Drbg rng(5);
  for (int i = 0; i < 2000; ++i) {
    auto p = FixedScalar::from_raw(1 + static_cast<std::int32_t>(rng.uniform(64 * kOneRaw)));
    double want = std::log(p.to_double());
    CHECK(std::abs(fx_ln(p).to_double() - want) <= std::ldexp(1.0, -8) + kLsb);
    auto x = FixedScalar::from_raw(static_cast<std::int32_t>(rng.uniform(16 * kOneRaw)) - static_cast<std::int32_t>(12 * kOneRaw));
    double e = std::exp(x.to_double());
    CHECK(std::abs(fx_exp(x).to_double() - e) <= std::max(std::ldexp(1.0, -10), e * std::ldexp(1.0, -12)));
  }
}

TEST_CASE("batchnorm folds into a per-channel affine") {
  auto gamma = tensor({2}, {1.0, 2.0});
  auto beta = tensor({2}, {0.5, -1.0});
  auto mean = tensor({2}, {0.25, 0.0});
  auto var = tensor({2}, {1.0, 4.0});
  Layer bn(LayerSpec::batchnorm2d(2), {gamma, beta, mean, var});
  auto x = tensor({2, 1, 2}, {1.25, -0.75, 3.0, 1.0});
  auto y = bn.forward(x);
  const double eps = std::ldexp(1.0, -10);
  const double g[] = {1.0, 2.0}, b[] = {0.5, -1.0}, m[] = {0.25, 0.0}, v[] = {1.0, 4.0};
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 2; ++i) {
      double want = g[c] * (x.at(c * 2 + i).to_double() - m[c]) / std::sqrt(v[c] + eps) + b[c];
      CHECK(std::abs(y.at(c * 2 + i).to_double() - want) <= 4 * kLsb);
    }
  }
}

TEST_CASE("dropout is identity and flatten keeps data") {
  Drbg rng(9);
  auto x = random_tensor(rng, {2, 3, 3}, kOneRaw);
  CHECK(layer_forward(LayerSpec::dropout(), {}, x) == x);
  auto f = layer_forward(LayerSpec::flatten(), {}, x);
  CHECK(f.shape() == Shape{18});
  CHECK(std::equal(f.raw().begin(), f.raw().end(), x.raw().begin()));
}

TEST_CASE("reference architectures: parameter counts, shapes, file round trip") {
  Drbg rng(1);
  auto xs = lenet_xs(rng);
  auto l5 = lenet5(rng);
  auto c5 = cnn5(rng);
  CHECK(xs.param_count() == 3968);
  CHECK(l5.param_count() == 61706);
  CHECK(c5.param_count() == 1727588);
  CHECK(xs.shapes()[1] == Shape{3, 24, 24});
  CHECK(xs.output_shape() == Shape{10});
  CHECK(c5.output_shape() == Shape{100});

  auto back = decode_model(encode_model(l5));
  CHECK(back.param_count() == l5.param_count());
  CHECK(back.split.has_value());
  CHECK(back.split->cut_bc == 9);
  auto in = random_tensor(rng, {1, 32, 32}, kOneRaw);
  CHECK(back.forward(in) == l5.forward(in));

  auto bytes = encode_model(xs);
  bytes.resize(bytes.size() - 3);
  CHECK_THROWS_AS(decode_model(bytes), Error);
}

TEST_CASE("forward is deterministic") {
  Drbg a(42), b(42);
  auto m1 = lenet_xs(a);
  auto m2 = lenet_xs(b);
  Drbg rng(4);
  auto in = random_tensor(rng, {1, 28, 28}, kOneRaw);
  CHECK(m1.forward(in) == m2.forward(in));
  auto t = m1.trace(in);
  CHECK(t.size() == m1.size() + 1);
  CHECK(t.back() == m1.forward(in));
}
