#include <doctest.h>

#include <numeric>

#include "privade/common/errors.hpp"
#include "privade/numerics/architectures.hpp"
#include "privade/split/split_model.hpp"

using namespace privade;
using namespace privade::numerics;
using namespace privade::split;

namespace {

FixedTensor random_input(Drbg& rng, const Shape& shape) {
  std::vector<std::int32_t> raw(shape_size(shape));
  for (auto& r : raw) r = static_cast<std::int32_t>(rng.uniform(kOneRaw));
  return FixedTensor(shape, std::move(raw));
}

Bytes seed_bytes(std::uint8_t b) { return Bytes(32, b); }

}  // namespace

TEST_CASE("lenet-xs split follows its manifest bands") {
  Drbg rng(1);
  auto m = lenet_xs(rng);
  auto s = split_model(m, m.split->cut_bc, seed_bytes(1));
  CHECK(s.a.size() == 2);
  CHECK(s.b.size() == 2);
  CHECK(s.c.size() == 7);
  CHECK(s.layer_count() == m.size());
  CHECK(s.mixer.size() == 3);
  CHECK(block_a_end(m) == 2);
  CHECK_THROWS_AS(split_model(m, 2, seed_bytes(1)), Error);
  CHECK_THROWS_AS(split_model(m, m.size(), seed_bytes(1)), Error);
}

TEST_CASE("identity mixer leaves the blocks as plain slices") {
  Drbg rng(2);
  auto m = lenet5(rng);
  std::vector<std::uint32_t> id(6);
  std::iota(id.begin(), id.end(), 0u);
  auto s = split_model_with_permutation(m, m.split->cut_bc, id);
  for (int t = 0; t < 10; ++t) {
    auto x = random_input(rng, m.input_shape());
    CHECK(forward_split(s, x) == m.forward(x));
    CHECK(forward_block(Block::A, s, x) == m.slice(0, 2, "a").forward(x));
  }
}

TEST_CASE("split forward equals unsplit forward on 100 inputs, all architectures") {
  for (const auto& name : architecture_names()) {
    Drbg rng(3);
    auto m = build_architecture(name, rng);
    auto s = split_model(m, m.split->cut_bc, seed_bytes(7));
    std::size_t checks = name == "cnn5" ? 20 : 100;
    for (std::size_t t = 0; t < checks; ++t) {
      auto x = random_input(rng, m.input_shape());
      CHECK(forward_split(s, x) == m.forward(x));
    }
  }
}

TEST_CASE("B on mixed activations matches the mixer-free pipeline") {
  for (const auto& name : architecture_names()) {
    Drbg rng(4);
    auto m = build_architecture(name, rng);
    auto s = split_model(m, m.split->cut_bc, seed_bytes(9));
    auto plain_a = m.slice(0, s.a_end, "a");
    auto plain_b = m.slice(s.a_end, s.cut_bc, "b");
    for (int t = 0; t < 5; ++t) {
      auto x = random_input(rng, m.input_shape());
      auto unmixed = plain_a.forward(x);
      auto mixed = forward_block(Block::A, s, x);
      CHECK(mixed == permute_channels(unmixed, s.mixer));
      auto want = plain_b.forward(unmixed);
      if (s.b_output_mixed) want = permute_channels(want, s.mixer);
      CHECK(forward_block(Block::B, s, mixed) == want);
    }
  }
}

TEST_CASE("zero-weight C outputs its bias") {
  Drbg rng(5);
  auto m = lenet_xs(rng);
  auto s = split_model(m, m.split->cut_bc, seed_bytes(3));
  std::vector<Layer> layers = s.c.layers();
  const Layer& last = layers.back();
  FixedTensor bias = last.params()[1];
  layers.back() = Layer(last.spec(), {FixedTensor(last.params()[0].shape()), bias});
  Model c("c-zero", s.c.input_shape(), layers);
  for (int t = 0; t < 5; ++t) {
    auto x = random_input(rng, m.input_shape());
    auto b = forward_block(Block::B, s, forward_block(Block::A, s, x));
    CHECK(c.forward(b) == bias);
  }
}

TEST_CASE("traces: length, per-layer replay, determinism, query counter") {
  Drbg rng(6);
  auto m = lenet_xs(rng);
  auto s = split_model(m, m.split->cut_bc, seed_bytes(4));
  auto x = random_input(rng, m.input_shape());
  auto tr1 = full_trace(s.b, {forward_block(Block::A, s, x)});
  CHECK(tr1.levels.size() == 3);
  CHECK(tr1.points() == 1);
  for (std::size_t l = 1; l < tr1.levels.size(); ++l) {
    CHECK(s.b.layer(l - 1).forward(tr1.levels[l - 1][0]) == tr1.levels[l][0]);
  }
  std::vector<FixedTensor> xs;
  for (int i = 0; i < 4; ++i) xs.push_back(random_input(rng, m.input_shape()));
  auto a1 = full_trace(m, xs);
  auto a2 = full_trace(m, xs);
  CHECK(a1.levels == a2.levels);
  CHECK(a1.layers() == m.size());

  auto before = s.queries();
  forward_split(s, x);
  forward_block(Block::A, s, x);
  CHECK(s.queries() == before + 2);
}

TEST_CASE("mixers differ across seeds") {
  Drbg rng(7);
  auto m = cnn5(rng);
  auto s1 = split_model(m, m.split->cut_bc, seed_bytes(1));
  auto s2 = split_model(m, m.split->cut_bc, seed_bytes(2));
  CHECK(s1.mixer != s2.mixer);
  CHECK(s1.b_output_mixed);
  auto sorted = s1.mixer;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}
