#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privade {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

Bytes concat(std::initializer_list<ByteView> parts);

/// Append-only big/little-endian encoder used by every wire and file format.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32_be(std::uint32_t v);
  void u64_be(std::uint64_t v);
  void u32_le(std::uint32_t v);
  void i32_le(std::int32_t v) { u32_le(static_cast<std::uint32_t>(v)); }
  void i64_be(std::int64_t v) { u64_be(static_cast<std::uint64_t>(v)); }
  void raw(ByteView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  // u32 big-endian length prefix followed by the bytes.
  void blob(ByteView b);
  void str(std::string_view s) { blob(as_bytes(s)); }

  const Bytes& bytes() const& { return buf_; }
  Bytes take() && { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  Bytes buf_;
};

/// Bounds-checked decoder; every short read throws Error{Malformed}.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32_be();
  std::uint64_t u64_be();
  std::uint32_t u32_le();
  std::int32_t i32_le() { return static_cast<std::int32_t>(u32_le()); }
  std::int64_t i64_be() { return static_cast<std::int64_t>(u64_be()); }
  ByteView raw(std::size_t n);
  Bytes blob();
  std::string str();

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  void expect_done() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace privade
