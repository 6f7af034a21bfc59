#include "ppress/lossless.hpp"

#include <algorithm>
#include <cstring>

#include "ppress/error.hpp"
#include "ppress/huffman.hpp"

namespace ppress {

CodecRegistry::CodecRegistry() {
  auto lzh = std::make_shared<LzhCodec>();
  auto store = std::make_shared<StoreCodec>();
  codecs_.emplace(lzh->name(), lzh);
  codecs_.emplace(store->name(), store);
}

CodecRegistry& CodecRegistry::global() {
  static CodecRegistry registry;
  return registry;
}

void CodecRegistry::add(std::shared_ptr<const LosslessCodec> codec) {
  std::lock_guard lock(mu_);
  codecs_[codec->name()] = std::move(codec);
}

std::shared_ptr<const LosslessCodec> CodecRegistry::get(std::string_view name) const {
  std::lock_guard lock(mu_);
  auto it = codecs_.find(name);
  if (it == codecs_.end()) throw ConfigError("unknown lossless codec: " + std::string(name));
  return it->second;
}

bool CodecRegistry::contains(std::string_view name) const {
  std::lock_guard lock(mu_);
  return codecs_.find(name) != codecs_.end();
}

std::vector<std::string> CodecRegistry::names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [k, _] : codecs_) out.push_back(k);
  return out;
}

Bytes lossless_encode(ByteSpan input, int level, std::string_view codec) {
  return CodecRegistry::global().get(codec)->encode(input, level);
}

Bytes lossless_decode(ByteSpan input, std::string_view codec) {
  return CodecRegistry::global().get(codec)->decode(input);
}

// ---------------------------------------------------------------------------

Bytes StoreCodec::encode(ByteSpan input, int) const { return Bytes(input.begin(), input.end()); }
Bytes StoreCodec::decode(ByteSpan input) const { return Bytes(input.begin(), input.end()); }

// lzh framing:
//   u8 kind (0 = stored, 1 = lz), varint original length, then
//   stored: raw bytes
//   lz:     varint sequence count, Huffman(literals), Huffman(command bytes)
// A sequence is (literal run, match length, match offset), each a varint in
// the command stream; the last sequence has match length 0.

namespace {

constexpr std::uint8_t kStored = 0;
constexpr std::uint8_t kLz = 1;
constexpr std::size_t kMinMatch = 4;
constexpr unsigned kHashBits = 16;
constexpr std::size_t kWindow = std::size_t{1} << 20;

std::uint32_t hash4(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return (v * 2654435761u) >> (32 - kHashBits);
}

void put_varint_bytes(std::vector<std::uint32_t>& cmd, std::uint64_t v) {
  while (v >= 0x80) {
    cmd.push_back(static_cast<std::uint32_t>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  cmd.push_back(static_cast<std::uint32_t>(v));
}

std::uint64_t get_varint_symbols(const std::vector<std::uint32_t>& cmd, std::size_t& pos) {
  std::uint64_t v = 0;
  for (unsigned shift = 0; shift < 64; shift += 7) {
    if (pos >= cmd.size()) throw FormatError("lzh command stream overrun");
    const auto b = cmd[pos++];
    if (b > 0xff) throw FormatError("lzh command symbol out of range");
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if ((b & 0x80) == 0) return v;
  }
  throw FormatError("lzh varint too long");
}

Bytes stored(ByteSpan input) {
  ByteWriter w;
  w.put_u8(kStored);
  w.put_varint(input.size());
  w.put_bytes(input);
  return w.take();
}

}  // namespace

Bytes LzhCodec::encode(ByteSpan input, int level) const {
  if (level <= 0 || input.size() < 2 * kMinMatch) return stored(input);
  const std::size_t max_chain = std::size_t{1} << std::clamp(level, 1, 9);
  const std::size_t n = input.size();
  const std::uint8_t* data = input.data();

  std::vector<std::int64_t> head(std::size_t{1} << kHashBits, -1);
  std::vector<std::int64_t> prev(n, -1);
  std::vector<std::uint32_t> literals;
  std::vector<std::uint32_t> cmd;
  std::uint64_t sequences = 0;
  std::size_t lit_start = 0;

  auto insert = [&](std::size_t pos) {
    if (pos + kMinMatch > n) return;
    const auto h = hash4(data + pos);
    prev[pos] = head[h];
    head[h] = static_cast<std::int64_t>(pos);
  };

  std::size_t i = 0;
  while (i + kMinMatch <= n) {
    std::size_t best_len = 0, best_off = 0;
    std::int64_t cand = head[hash4(data + i)];
    std::size_t chain = 0;
    while (cand >= 0 && chain < max_chain && i - static_cast<std::size_t>(cand) <= kWindow) {
      const auto c = static_cast<std::size_t>(cand);
      if (data[c + best_len] == data[i + best_len] || best_len == 0) {
        std::size_t len = 0;
        while (i + len < n && data[c + len] == data[i + len]) ++len;
        if (len > best_len) {
          best_len = len;
          best_off = i - c;
          if (i + len == n) break;
        }
      }
      cand = prev[c];
      ++chain;
    }
    if (best_len >= kMinMatch) {
      for (std::size_t k = lit_start; k < i; ++k) literals.push_back(data[k]);
      put_varint_bytes(cmd, i - lit_start);
      put_varint_bytes(cmd, best_len);
      put_varint_bytes(cmd, best_off);
      ++sequences;
      // Long runs: index only a bounded prefix of the match.
      const std::size_t index_end = std::min(i + best_len, i + 64);
      for (std::size_t k = i; k < index_end; ++k) insert(k);
      i += best_len;
      lit_start = i;
    } else {
      insert(i);
      ++i;
    }
  }
  for (std::size_t k = lit_start; k < n; ++k) literals.push_back(data[k]);
  put_varint_bytes(cmd, n - lit_start);
  put_varint_bytes(cmd, 0);
  ++sequences;

  ByteWriter w;
  w.put_u8(kLz);
  w.put_varint(n);
  w.put_varint(sequences);
  w.put_varint(literals.size());
  w.put_varint(cmd.size());
  huffman::encode(literals, w);
  huffman::encode(cmd, w);
  if (w.size() >= n + 1 + 10) return stored(input);
  return w.take();
}

Bytes LzhCodec::decode(ByteSpan input) const {
  ByteReader r(input);
  const auto kind = r.get_u8();
  const auto n = r.get_varint();
  if (kind == kStored) {
    if (r.remaining() != n) throw FormatError("lzh stored length mismatch");
    auto b = r.get_bytes(static_cast<std::size_t>(n));
    return Bytes(b.begin(), b.end());
  }
  if (kind != kLz) throw FormatError("unknown lzh block kind");
  const auto sequences = r.get_varint();
  const auto n_lit = r.get_varint();
  const auto n_cmd = r.get_varint();
  if (n_lit > n || n_cmd > 30 * (sequences + 1)) throw FormatError("lzh header inconsistent");
  const auto literals = huffman::decode(r, static_cast<std::size_t>(n_lit));
  const auto cmd = huffman::decode(r, static_cast<std::size_t>(n_cmd));
  if (!r.at_end()) throw FormatError("trailing bytes after lzh stream");

  Bytes out;
  out.reserve(static_cast<std::size_t>(n));
  std::size_t lit_pos = 0, cmd_pos = 0;
  for (std::uint64_t s = 0; s < sequences; ++s) {
    const auto run = get_varint_symbols(cmd, cmd_pos);
    const auto len = get_varint_symbols(cmd, cmd_pos);
    if (run > literals.size() - lit_pos || out.size() + run > n) {
      throw FormatError("lzh literal run out of range");
    }
    for (std::uint64_t k = 0; k < run; ++k) {
      const auto sym = literals[lit_pos++];
      if (sym > 0xff) throw FormatError("lzh literal out of range");
      out.push_back(static_cast<std::uint8_t>(sym));
    }
    if (len == 0) continue;
    const auto off = get_varint_symbols(cmd, cmd_pos);
    if (off == 0 || off > out.size() || out.size() + len > n) {
      throw FormatError("lzh match out of range");
    }
    std::size_t from = out.size() - static_cast<std::size_t>(off);
    for (std::uint64_t k = 0; k < len; ++k) out.push_back(out[from + k]);
  }
  if (out.size() != n || lit_pos != literals.size() || cmd_pos != cmd.size()) {
    throw FormatError("lzh stream length mismatch");
  }
  return out;
}

}  // namespace ppress
