#pragma once

#include <cstdint>

#include "privade/commit/commitment.hpp"
#include "privade/commit/merkle.hpp"

namespace privade::commit {

// Record framing: tag (u8), body length (u32 BE), body.
enum class RecordTag : std::uint8_t {
  Commitment = 0x10,
  MerkleRoot = 0x11,
  MerklePath = 0x12,
};

void write_record(ByteWriter& w, const Commitment& c);
void write_record(ByteWriter& w, const MerkleRoot& r);
// Body: index (u64 BE), step count (u32 BE), then per step side (u8) + sibling (32 bytes).
void write_record(ByteWriter& w, const MerklePath& p);

Commitment read_commitment(ByteReader& r);
MerkleRoot read_merkle_root(ByteReader& r);
MerklePath read_merkle_path(ByteReader& r);

Digest read_digest(ByteReader& r);

}  // namespace privade::commit
