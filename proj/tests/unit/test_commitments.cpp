#include <doctest.h>

#include <openssl/evp.h>

#include <array>
#include <set>

#include "privade/commit/commitment.hpp"
#include "privade/commit/merkle.hpp"
#include "privade/commit/records.hpp"
#include "privade/common/errors.hpp"

using namespace privade;
using namespace privade::commit;

namespace {

Digest oracle_hash(const Bytes& preimage) {
  Digest d{};
  unsigned int len = 0;
  EVP_Digest(preimage.data(), preimage.size(), d.data(), &len, EVP_sha256(), nullptr);
  return d;
}

Digest oracle_leaf(std::uint64_t i, const Bytes& m) {
  Bytes p{0x00};
  for (int s = 56; s >= 0; s -= 8) p.push_back(static_cast<std::uint8_t>(i >> s));
  p.insert(p.end(), m.begin(), m.end());
  return oracle_hash(p);
}

Digest oracle_node(const Digest& l, const Digest& r) {
  Bytes p{0x01};
  p.insert(p.end(), l.begin(), l.end());
  p.insert(p.end(), r.begin(), r.end());
  return oracle_hash(p);
}

// Root recomputed level by level from the padding rule.
Digest oracle_root(const std::vector<Bytes>& leaves) {
  std::size_t width = 2;
  while (width < leaves.size()) width *= 2;
  std::vector<Digest> level;
  for (std::size_t i = 0; i < width; ++i) level.push_back(i < leaves.size() ? oracle_leaf(i, leaves[i]) : pad_leaf());
  while (level.size() > 1) {
    std::vector<Digest> up;
    for (std::size_t i = 0; i < level.size(); i += 2) up.push_back(oracle_node(level[i], level[i + 1]));
    level = up;
  }
  return level[0];
}

std::vector<Bytes> random_leaves(Drbg& rng, std::size_t n) {
  std::vector<Bytes> leaves;
  for (std::size_t i = 0; i < n; ++i) leaves.push_back(rng.bytes(1 + rng.uniform(48)));
  return leaves;
}

}  // namespace

TEST_CASE("setup levels") {
  CHECK(setup_com(128).randomness_bytes == 32);
  auto p256 = setup_com(256);
  CHECK(p256.randomness_bytes == 32);
  CHECK(p256.security_level == 256);
  CHECK_THROWS_AS(setup_com(64), Error);
}

TEST_CASE("commitment digest matches H(0x02 || r || m)") {
  auto pp = setup_com(128);
  Drbg rng(1);
  Bytes m = {1, 2, 3, 4, 5};
  auto o = commit::commit(pp, m, rng);
  CHECK(o.randomness.size() == 32);
  Bytes pre{0x02};
  pre.insert(pre.end(), o.randomness.begin(), o.randomness.end());
  pre.insert(pre.end(), m.begin(), m.end());
  CHECK(o.com.digest == oracle_hash(pre));
  CHECK(open(pp, o.com, m, o.randomness));
}

TEST_CASE("commitment completeness, randomization and tamper rejection") {
  auto pp = setup_com(128);
  Drbg rng(2);
  std::set<Digest> seen;
  Bytes m = rng.bytes(40);
  for (int t = 0; t < 10000; ++t) seen.insert(commit::commit(pp, m, rng).com.digest);
  CHECK(seen.size() == 10000);

  for (int t = 0; t < 2000; ++t) {
    Bytes msg = rng.bytes(1 + rng.uniform(64));
    auto o = commit::commit(pp, msg, rng);
    REQUIRE(open(pp, o.com, msg, o.randomness));
    Bytes m2 = msg;
    m2[rng.uniform(m2.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
    CHECK_FALSE(open(pp, o.com, m2, o.randomness));
    Bytes r2 = o.randomness;
    r2[rng.uniform(r2.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
    CHECK_FALSE(open(pp, o.com, msg, r2));
    Bytes other = rng.bytes(msg.size());
    if (other != msg) CHECK_FALSE(open(pp, o.com, other, o.randomness));
  }
}

TEST_CASE("hiding smoke test: digest byte frequencies") {
  auto pp = setup_com(128);
  Drbg rng(3);
  Bytes m0(32, 0x00), m1(32, 0xff);
  std::array<double, 256> h0{}, h1{};
  for (int t = 0; t < 10000; ++t) {
    for (auto b : commit::commit(pp, m0, rng).com.digest) h0[b] += 1;
    for (auto b : commit::commit(pp, m1, rng).com.digest) h1[b] += 1;
  }
  const double expected = 10000.0 * 32 / 256;
  double chi0 = 0, chi1 = 0, two = 0;
  for (int b = 0; b < 256; ++b) {
    chi0 += (h0[b] - expected) * (h0[b] - expected) / expected;
    chi1 += (h1[b] - expected) * (h1[b] - expected) / expected;
    two += (h0[b] - h1[b]) * (h0[b] - h1[b]) / (h0[b] + h1[b]);
  }
  // 255 degrees of freedom; 360 is past the 99.99th percentile.
  CHECK(chi0 < 360);
  CHECK(chi1 < 360);
  CHECK(two < 360);
}

TEST_CASE("merkle roots follow the padding rule") {
  auto pp = setup_com(128);
  Bytes leaf = {9, 9, 9};
  auto t1 = mt_commit(pp, {leaf});
  CHECK(t1.root().digest == oracle_node(oracle_leaf(0, leaf), pad_leaf()));
  CHECK(mt_open(t1, 0).steps.size() == 1);
  CHECK(leaf_hash(0, leaf) != leaf_hash(1, leaf));
  CHECK_THROWS_AS(mt_commit(pp, {}), Error);

  Drbg rng(4);
  for (std::size_t n = 1; n <= 64; ++n) {
    auto leaves = random_leaves(rng, n);
    CHECK(mt_commit(pp, leaves).root().digest == oracle_root(leaves));
  }
}

TEST_CASE("merkle completeness sweep over 1..64 leaves") {
  auto pp = setup_com(128);
  Drbg rng(5);
  for (std::size_t n = 1; n <= 64; ++n) {
    auto leaves = random_leaves(rng, n);
    auto tree = mt_commit(pp, leaves);
    for (std::size_t i = 0; i < n; ++i) {
      auto path = mt_open(tree, i);
      CHECK(path.steps.size() == merkle_height(n));
      CHECK(mt_verify(pp, tree.root(), i, leaves[i], path));
    }
    CHECK_THROWS_AS(mt_open(tree, n), Error);
  }
}

TEST_CASE("merkle position binding and truncation") {
  auto pp = setup_com(128);
  Drbg rng(6);
  auto leaves = random_leaves(rng, 8);
  auto tree = mt_commit(pp, leaves);
  for (std::size_t i = 0; i < 8; ++i) {
    auto path = mt_open(tree, i);
    for (std::size_t j = 0; j < 8; ++j) {
      if (j != i) CHECK_FALSE(mt_verify(pp, tree.root(), j, leaves[i], path));
    }
    auto cut = path;
    cut.steps.pop_back();
    CHECK_FALSE(mt_verify(pp, tree.root(), i, leaves[i], cut));
    auto longer = path;
    longer.steps.push_back(path.steps.back());
    CHECK_FALSE(mt_verify(pp, tree.root(), i, leaves[i], longer));
  }
}

TEST_CASE("merkle tamper fuzz: 100000 mutations, no false accepts") {
  auto pp = setup_com(128);
  Drbg rng(7);
  std::size_t accepted = 0;
  for (int t = 0; t < 100000; ++t) {
    std::size_t n = 1 + rng.uniform(16);
    auto leaves = random_leaves(rng, n);
    auto tree = mt_commit(pp, leaves);
    std::size_t i = rng.uniform(n);
    auto path = mt_open(tree, i);
    Bytes leaf = leaves[i];
    auto root = tree.root();
    std::size_t index = i;
    switch (rng.uniform(5)) {
      case 0: leaf[rng.uniform(leaf.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8)); break;
      case 1: {
        auto& step = path.steps[rng.uniform(path.steps.size())];
        step.sibling[rng.uniform(32)] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
        break;
      }
      case 2: {
        auto& step = path.steps[rng.uniform(path.steps.size())];
        step.side = step.side == Side::Left ? Side::Right : Side::Left;
        break;
      }
      case 3: root.digest[rng.uniform(32)] ^= static_cast<std::uint8_t>(1u << rng.uniform(8)); break;
      default: index = (i + 1 + rng.uniform(std::max<std::size_t>(n, 2) - 1)) % std::max<std::size_t>(n, 2); break;
    }
    if (mt_verify(pp, root, index, leaf, path)) ++accepted;
  }
  CHECK(accepted == 0);
}

TEST_CASE("record framing round trip") {
  auto pp = setup_com(128);
  Drbg rng(8);
  auto leaves = random_leaves(rng, 5);
  auto tree = mt_commit(pp, leaves);
  auto path = mt_open(tree, 3);
  auto com = commit::commit(pp, leaves[0], rng).com;
  ByteWriter w;
  write_record(w, com);
  write_record(w, tree.root());
  write_record(w, path);
  Bytes bytes = std::move(w).take();
  CHECK(bytes[0] == 0x10);
  ByteReader r(bytes);
  CHECK(read_commitment(r) == com);
  CHECK(read_merkle_root(r) == tree.root());
  CHECK(read_merkle_path(r) == path);
  CHECK(r.done());

  ByteReader wrong(bytes);
  CHECK_THROWS_AS(read_merkle_root(wrong), Error);
}
