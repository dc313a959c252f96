#include "privade/commit/records.hpp"

#include <algorithm>

#include "privade/common/errors.hpp"

namespace privade::commit {

namespace {

constexpr std::uint32_t kMaxSteps = 63;

void header(ByteWriter& w, RecordTag tag, std::size_t len) {
  w.u8(static_cast<std::uint8_t>(tag));
  w.u32_be(static_cast<std::uint32_t>(len));
}

ByteReader body(ByteReader& r, RecordTag tag) {
  std::uint8_t got = r.u8();
  if (got != static_cast<std::uint8_t>(tag)) fail(ErrorCode::Malformed, "unexpected record tag");
  std::uint32_t len = r.u32_be();
  return ByteReader(r.raw(len));
}

}  // namespace

Digest read_digest(ByteReader& r) {
  Digest d{};
  ByteView b = r.raw(d.size());
  std::copy(b.begin(), b.end(), d.begin());
  return d;
}

void write_record(ByteWriter& w, const Commitment& c) {
  header(w, RecordTag::Commitment, c.digest.size());
  w.raw(view(c.digest));
}

void write_record(ByteWriter& w, const MerkleRoot& root) {
  header(w, RecordTag::MerkleRoot, root.digest.size());
  w.raw(view(root.digest));
}

void write_record(ByteWriter& w, const MerklePath& p) {
  header(w, RecordTag::MerklePath, 12 + 33 * p.steps.size());
  w.u64_be(p.index);
  w.u32_be(static_cast<std::uint32_t>(p.steps.size()));
  for (const auto& s : p.steps) {
    w.u8(static_cast<std::uint8_t>(s.side));
    w.raw(view(s.sibling));
  }
}

Commitment read_commitment(ByteReader& r) {
  ByteReader b = body(r, RecordTag::Commitment);
  Commitment c{read_digest(b)};
  b.expect_done();
  return c;
}

MerkleRoot read_merkle_root(ByteReader& r) {
  ByteReader b = body(r, RecordTag::MerkleRoot);
  MerkleRoot root{read_digest(b)};
  b.expect_done();
  return root;
}

MerklePath read_merkle_path(ByteReader& r) {
  ByteReader b = body(r, RecordTag::MerklePath);
  MerklePath p;
  p.index = b.u64_be();
  std::uint32_t count = b.u32_be();
  if (count > kMaxSteps) fail(ErrorCode::Malformed, "Merkle path too long");
  for (std::uint32_t k = 0; k < count; ++k) {
    std::uint8_t side = b.u8();
    if (side > 1) fail(ErrorCode::Malformed, "bad Merkle path side");
    p.steps.push_back({read_digest(b), static_cast<Side>(side)});
  }
  b.expect_done();
  return p;
}

}  // namespace privade::commit
