#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppress/error.hpp"

namespace ppress {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

// Append-only little-endian writer.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes initial) : buf_(std::move(initial)) {}

  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_u8(std::uint8_t v) { buf_.push_back(v); }
  void put_u16(std::uint16_t v) { put(v); }
  void put_u32(std::uint32_t v) { put(v); }
  void put_u64(std::uint64_t v) { put(v); }
  void put_f64(double v) { put(v); }
  void put_varint(std::uint64_t v);
  void put_bytes(ByteSpan bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }
  void put_string(std::string_view s);  // varint length + bytes
  // Length-prefixed (varint) blob.
  void put_blob(ByteSpan bytes);

  std::size_t size() const { return buf_.size(); }
  std::uint8_t* data() { return buf_.data(); }
  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

// Bounds-checked little-endian reader; every overrun throws FormatError.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan bytes) : buf_(bytes) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    require(sizeof(T));
    T value;
    std::memcpy(&value, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::uint8_t get_u8() { return get<std::uint8_t>(); }
  std::uint16_t get_u16() { return get<std::uint16_t>(); }
  std::uint32_t get_u32() { return get<std::uint32_t>(); }
  std::uint64_t get_u64() { return get<std::uint64_t>(); }
  double get_f64() { return get<double>(); }
  std::uint64_t get_varint();
  ByteSpan get_bytes(std::size_t n);
  std::string get_string();
  ByteSpan get_blob();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void require(std::size_t n) const {
    if (n > buf_.size() - pos_) throw FormatError("truncated stream");
  }

  ByteSpan buf_;
  std::size_t pos_ = 0;
};

// LSB-first bit packer.
class BitWriter {
 public:
  void put_bit(bool bit) {
    if (nbits_ % 8 == 0) buf_.push_back(0);
    if (bit) buf_.back() |= static_cast<std::uint8_t>(1u << (nbits_ % 8));
    ++nbits_;
  }
  // Writes the low `count` bits of `value`, least significant first.
  void put_bits(std::uint64_t value, unsigned count) {
    for (unsigned i = 0; i < count; ++i) put_bit((value >> i) & 1u);
  }
  std::uint64_t bit_count() const { return nbits_; }
  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
  std::uint64_t nbits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(ByteSpan bytes) : buf_(bytes) {}

  bool get_bit() {
    if (pos_ >= buf_.size() * 8) throw FormatError("bit stream overrun");
    const bool bit = (buf_[pos_ / 8] >> (pos_ % 8)) & 1u;
    ++pos_;
    return bit;
  }
  std::uint64_t get_bits(unsigned count) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < count; ++i) v |= static_cast<std::uint64_t>(get_bit()) << i;
    return v;
  }
  std::uint64_t bit_position() const { return pos_; }
  std::uint64_t bit_size() const { return buf_.size() * 8; }

 private:
  ByteSpan buf_;
  std::uint64_t pos_ = 0;
};

// Reads a whole file; throws DataError when it cannot be opened.
Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteSpan bytes);

}  // namespace ppress
