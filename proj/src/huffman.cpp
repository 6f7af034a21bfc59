#include "ppress/huffman.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "ppress/error.hpp"

namespace ppress::huffman {

namespace {

struct Node {
  std::uint64_t weight;
  std::int32_t left;
  std::int32_t right;
};

// Huffman code lengths for `weights` (all > 0). Returns max depth via `lengths`.
void huffman_lengths(const std::vector<std::uint64_t>& weights, std::vector<std::uint8_t>& lengths) {
  const std::size_t n = weights.size();
  lengths.assign(n, 0);
  if (n == 1) {
    lengths[0] = 1;
    return;
  }
  std::vector<Node> nodes;
  nodes.reserve(2 * n);
  using Item = std::pair<std::uint64_t, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back({weights[i], -1, -1});
    heap.emplace(weights[i], static_cast<std::int32_t>(i));
  }
  while (heap.size() > 1) {
    auto [wa, a] = heap.top();
    heap.pop();
    auto [wb, b] = heap.top();
    heap.pop();
    nodes.push_back({wa + wb, a, b});
    heap.emplace(wa + wb, static_cast<std::int32_t>(nodes.size() - 1));
  }
  // Iterative depth assignment from the root.
  std::vector<std::pair<std::int32_t, std::uint32_t>> stack{{heap.top().second, 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const Node& nd = nodes[static_cast<std::size_t>(id)];
    if (nd.left < 0) {
      lengths[static_cast<std::size_t>(id)] = static_cast<std::uint8_t>(std::min<std::uint32_t>(depth, 255));
    } else {
      stack.emplace_back(nd.left, depth + 1);
      stack.emplace_back(nd.right, depth + 1);
    }
  }
}

// Canonical code values, in the order of `book` (sorted by symbol).
std::vector<std::uint32_t> canonical_codes(const CodeBook& book) {
  const std::size_t n = book.symbols.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return book.lengths[a] != book.lengths[b] ? book.lengths[a] < book.lengths[b]
                                              : book.symbols[a] < book.symbols[b];
  });
  std::vector<std::uint32_t> codes(n);
  std::uint32_t code = 0;
  unsigned prev_len = book.lengths.empty() ? 0 : book.lengths[order[0]];
  for (std::size_t k = 0; k < n; ++k) {
    const unsigned len = book.lengths[order[k]];
    code <<= (len - prev_len);
    codes[order[k]] = code;
    ++code;
    prev_len = len;
  }
  return codes;
}

}  // namespace

CodeBook build(std::span<const std::uint32_t> symbols) {
  std::unordered_map<std::uint32_t, std::uint64_t> freq;
  for (auto s : symbols) ++freq[s];
  CodeBook book;
  book.symbols.reserve(freq.size());
  for (const auto& [s, _] : freq) book.symbols.push_back(s);
  std::sort(book.symbols.begin(), book.symbols.end());
  if (book.symbols.empty()) return book;
  std::vector<std::uint64_t> weights(book.symbols.size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = freq[book.symbols[i]];
  // Flatten the distribution until the tree fits the length limit.
  for (;;) {
    huffman_lengths(weights, book.lengths);
    if (*std::max_element(book.lengths.begin(), book.lengths.end()) <= kMaxCodeLength) break;
    for (auto& w : weights) w = (w >> 1) | 1;
  }
  return book;
}

void encode(std::span<const std::uint32_t> symbols, ByteWriter& out) {
  const CodeBook book = build(symbols);
  out.put_varint(book.symbols.size());
  std::uint32_t prev = 0;
  for (std::size_t i = 0; i < book.symbols.size(); ++i) {
    out.put_varint(book.symbols[i] - prev);
    prev = book.symbols[i];
    out.put_u8(book.lengths[i]);
  }
  if (book.symbols.empty()) {
    out.put_varint(0);
    return;
  }
  const auto codes = canonical_codes(book);
  std::unordered_map<std::uint32_t, std::size_t> index;
  index.reserve(book.symbols.size());
  for (std::size_t i = 0; i < book.symbols.size(); ++i) index.emplace(book.symbols[i], i);

  // Pack MSB-first within each code so decoding can walk canonical ranges.
  Bytes packed;
  std::uint64_t acc = 0;
  unsigned nacc = 0;
  for (auto s : symbols) {
    const std::size_t k = index.find(s)->second;
    const unsigned len = book.lengths[k];
    acc = (acc << len) | codes[k];
    nacc += len;
    while (nacc >= 8) {
      packed.push_back(static_cast<std::uint8_t>(acc >> (nacc - 8)));
      nacc -= 8;
    }
    acc &= (nacc == 0) ? 0 : ((std::uint64_t{1} << nacc) - 1);
  }
  if (nacc > 0) packed.push_back(static_cast<std::uint8_t>(acc << (8 - nacc)));
  out.put_blob(packed);
}

std::vector<std::uint32_t> decode(ByteReader& in, std::size_t count) {
  const auto n = in.get_varint();
  if (n > (std::uint64_t{1} << 32)) throw FormatError("Huffman table too large");
  CodeBook book;
  book.symbols.resize(n);
  book.lengths.resize(n);
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    prev += in.get_varint();
    if (prev > UINT32_MAX) throw FormatError("Huffman symbol out of range");
    book.symbols[i] = static_cast<std::uint32_t>(prev);
    book.lengths[i] = in.get_u8();
    if (book.lengths[i] == 0 || book.lengths[i] > kMaxCodeLength) {
      throw FormatError("invalid Huffman code length");
    }
  }
  const ByteSpan packed = in.get_blob();
  std::vector<std::uint32_t> out;
  if (count == 0) return out;
  if (n == 0) throw FormatError("empty Huffman table for nonempty stream");

  // Canonical decoding tables: symbols ordered by (length, symbol).
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return book.lengths[a] != book.lengths[b] ? book.lengths[a] < book.lengths[b]
                                              : book.symbols[a] < book.symbols[b];
  });
  std::vector<std::uint32_t> sorted_symbols(n);
  std::vector<std::uint32_t> len_count(kMaxCodeLength + 2, 0);
  for (std::size_t k = 0; k < n; ++k) {
    sorted_symbols[k] = book.symbols[order[k]];
    ++len_count[book.lengths[order[k]]];
  }
  // first_code[len], first_index[len]
  std::vector<std::int64_t> first_code(kMaxCodeLength + 2, 0);
  std::vector<std::int64_t> first_index(kMaxCodeLength + 2, 0);
  std::int64_t code = 0, index = 0;
  for (unsigned len = 1; len <= kMaxCodeLength; ++len) {
    code <<= 1;
    first_code[len] = code;
    first_index[len] = index;
    code += len_count[len];
    index += len_count[len];
  }

  out.reserve(count);
  std::size_t bitpos = 0;
  const std::size_t total_bits = packed.size() * 8;
  while (out.size() < count) {
    std::int64_t c = 0;
    unsigned len = 0;
    for (;;) {
      if (bitpos >= total_bits) throw FormatError("Huffman stream overrun");
      c = (c << 1) | ((packed[bitpos >> 3] >> (7 - (bitpos & 7))) & 1);
      ++bitpos;
      ++len;
      if (len > kMaxCodeLength) throw FormatError("invalid Huffman code");
      const std::int64_t offset = c - first_code[len];
      if (offset >= 0 && offset < static_cast<std::int64_t>(len_count[len])) {
        out.push_back(sorted_symbols[static_cast<std::size_t>(first_index[len] + offset)]);
        break;
      }
    }
  }
  return out;
}

}  // namespace ppress::huffman
