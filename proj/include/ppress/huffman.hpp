#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppress/bytes.hpp"

namespace ppress::huffman {

constexpr unsigned kMaxCodeLength = 30;

// Canonical code: (symbol, length) pairs sorted by symbol, lengths in
// [1, kMaxCodeLength]. A single-symbol alphabet gets a 1-bit code.
struct CodeBook {
  std::vector<std::uint32_t> symbols;
  std::vector<std::uint8_t> lengths;
};

// Builds length-limited code lengths from symbol frequencies.
CodeBook build(std::span<const std::uint32_t> symbols);

// Serializes the code book followed by the packed code bits. The symbol
// count is not stored; the caller frames it.
void encode(std::span<const std::uint32_t> symbols, ByteWriter& out);
std::vector<std::uint32_t> decode(ByteReader& in, std::size_t count);

}  // namespace ppress::huffman
