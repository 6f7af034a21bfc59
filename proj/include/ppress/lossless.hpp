#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ppress/bytes.hpp"

namespace ppress {

// A byte-oriented lossless coder. Implementations must be stateless and
// reentrant; decode(encode(b)) == b for every input.
class LosslessCodec {
 public:
  virtual ~LosslessCodec() = default;
  virtual std::string name() const = 0;
  virtual Bytes encode(ByteSpan input, int level) const = 0;
  virtual Bytes decode(ByteSpan input) const = 0;
};

// Name -> codec table. The built-in "lzh" and "store" codecs are always
// present; external codecs (Zstd, LZ4, ...) can be registered at startup.
class CodecRegistry {
 public:
  static CodecRegistry& global();

  void add(std::shared_ptr<const LosslessCodec> codec);
  // Throws ConfigError for unknown names.
  std::shared_ptr<const LosslessCodec> get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  CodecRegistry();
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const LosslessCodec>, std::less<>> codecs_;
};

inline constexpr std::string_view kDefaultCodec = "lzh";

// Built-in dictionary coder: greedy LZ77 with hash chains, Huffman-coded
// literal and command streams, and a stored fallback that bounds expansion
// to a few bytes of framing. Level 0 stores; levels 1..9 deepen the search.
class LzhCodec final : public LosslessCodec {
 public:
  std::string name() const override { return "lzh"; }
  Bytes encode(ByteSpan input, int level) const override;
  Bytes decode(ByteSpan input) const override;
};

class StoreCodec final : public LosslessCodec {
 public:
  std::string name() const override { return "store"; }
  Bytes encode(ByteSpan input, int level) const override;
  Bytes decode(ByteSpan input) const override;
};

Bytes lossless_encode(ByteSpan input, int level = 1, std::string_view codec = kDefaultCodec);
Bytes lossless_decode(ByteSpan input, std::string_view codec = kDefaultCodec);

}  // namespace ppress
