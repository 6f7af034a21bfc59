#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "ppress/bytes.hpp"

namespace ppress {

// Incremental SHA-256; digest() finalizes and returns lowercase hex.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(ByteSpan bytes);
  Sha256& update(std::string_view text);
  std::string hex_digest();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(ByteSpan bytes);
std::string sha256_hex(std::string_view text);

std::uint32_t crc32(ByteSpan bytes);

}  // namespace ppress
