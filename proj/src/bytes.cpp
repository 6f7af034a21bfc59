#include "ppress/bytes.hpp"

#include <fstream>
#include <iterator>

namespace ppress {

void ByteWriter::put_varint(std::uint64_t v) {
  while (v >= 0x80) {
    buf_.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  buf_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::put_string(std::string_view s) {
  put_varint(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::put_blob(ByteSpan bytes) {
  put_varint(bytes.size());
  put_bytes(bytes);
}

std::uint64_t ByteReader::get_varint() {
  std::uint64_t v = 0;
  for (unsigned shift = 0; shift < 64; shift += 7) {
    const std::uint8_t b = get_u8();
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if ((b & 0x80) == 0) return v;
  }
  throw FormatError("varint too long");
}

ByteSpan ByteReader::get_bytes(std::size_t n) {
  require(n);
  ByteSpan out = buf_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::get_string() {
  const auto n = get_varint();
  if (n > remaining()) throw FormatError("truncated string");
  auto bytes = get_bytes(static_cast<std::size_t>(n));
  return {bytes.begin(), bytes.end()};
}

ByteSpan ByteReader::get_blob() {
  const auto n = get_varint();
  if (n > remaining()) throw FormatError("truncated blob");
  return get_bytes(static_cast<std::size_t>(n));
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteSpan bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace ppress
