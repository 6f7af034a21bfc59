#include <cstring>

#include "ppress/error.hpp"
#include "ppress/hash.hpp"
#include "ppress/reducers.hpp"

namespace ppress {

namespace {

constexpr char kMagic[4] = {'P', 'P', 'R', 'S'};

Bytes names_block(const std::vector<std::string>& names) {
  ByteWriter w;
  for (const auto& n : names) w.put_string(n);
  return w.take();
}

// Header bytes with zeroed offsets; sizes are fixed by stream/name counts.
std::uint64_t header_size(const CompressedArtifact& a) {
  return 4 + 2 + 1 + 1 + 1 + 8 * a.bound.size() + 1 + 1 + 8 + 4 + 4 + 20 * a.streams.size() + 4 +
         names_block(a.names).size() + 4;
}

}  // namespace

std::uint64_t CompressedArtifact::header_bytes() const { return header_size(*this); }

std::uint64_t CompressedArtifact::comp_bytes() const {
  std::uint64_t total = header_bytes();
  for (const auto& s : streams) total += s.size();
  return total;
}

double CompressedArtifact::ratio() const {
  return static_cast<double>(orig_bytes()) / static_cast<double>(comp_bytes());
}

Bytes serialize(const CompressedArtifact& a) {
  if (a.bound.size() > 255) throw ConfigError("too many bound entries");
  if (!a.names.empty() && a.names.size() != a.n_feat) throw ConfigError("name count mismatch");
  ByteWriter w;
  w.put_bytes(ByteSpan(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.put_u16(kFormatVersion);
  w.put_u8(static_cast<std::uint8_t>(a.method));
  w.put_u8(static_cast<std::uint8_t>(a.mode));
  w.put_u8(static_cast<std::uint8_t>(a.bound.size()));
  for (double b : a.bound) w.put_f64(b);
  w.put_u8(static_cast<std::uint8_t>(a.layout));
  w.put_u8(static_cast<std::uint8_t>(a.dtype));
  w.put_u64(a.n_obs);
  w.put_u32(a.n_feat);
  w.put_u32(static_cast<std::uint32_t>(a.streams.size()));
  std::uint64_t offset = header_size(a);
  for (const auto& s : a.streams) {
    w.put_u64(offset);
    w.put_u64(s.size());
    w.put_u32(crc32(s));
    offset += s.size();
  }
  const Bytes names = names_block(a.names);
  w.put_u32(static_cast<std::uint32_t>(names.size()));
  w.put_bytes(names);
  w.put_u32(crc32(w.bytes()));
  for (const auto& s : a.streams) w.put_bytes(s);
  return w.take();
}

CompressedArtifact parse_artifact(ByteSpan bytes) {
  ByteReader r(bytes);
  const ByteSpan magic = r.get_bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("not a PPRS artifact");
  const auto version = r.get_u16();
  if (version != kFormatVersion) {
    throw FormatError("unsupported artifact version " + std::to_string(version));
  }
  CompressedArtifact a;
  const auto method = r.get_u8();
  const auto mode = r.get_u8();
  if (method > static_cast<std::uint8_t>(Method::sample_wor)) throw FormatError("bad method id");
  if (mode > static_cast<std::uint8_t>(Mode::rate)) throw FormatError("bad mode id");
  a.method = static_cast<Method>(method);
  a.mode = static_cast<Mode>(mode);
  const auto k = r.get_u8();
  for (unsigned i = 0; i < k; ++i) a.bound.push_back(r.get_f64());
  const auto layout = r.get_u8();
  const auto dtype = r.get_u8();
  if (layout > 1 || dtype > 1) throw FormatError("bad layout/dtype id");
  a.layout = static_cast<Layout>(layout);
  a.dtype = static_cast<DType>(dtype);
  a.n_obs = r.get_u64();
  a.n_feat = r.get_u32();
  const auto count = r.get_u32();
  if (count > r.remaining() / 20) throw FormatError("stream table truncated");
  std::vector<StreamEntry> table(count);
  for (auto& e : table) {
    e.offset = r.get_u64();
    e.length = r.get_u64();
    e.crc = r.get_u32();
  }
  const auto names_len = r.get_u32();
  {
    ByteReader nr(r.get_bytes(names_len));
    while (!nr.at_end()) a.names.push_back(nr.get_string());
  }
  const std::size_t header_end = r.position();
  const auto header_crc = r.get_u32();
  if (header_crc != crc32(bytes.first(header_end))) throw FormatError("header checksum mismatch");
  if (!a.names.empty() && a.names.size() != a.n_feat) throw FormatError("name count mismatch");
  for (const auto& e : table) {
    if (e.offset > bytes.size() || e.length > bytes.size() - e.offset) {
      throw FormatError("stream extends past end of artifact");
    }
    ByteSpan s = bytes.subspan(e.offset, e.length);
    if (crc32(s) != e.crc) throw FormatError("stream checksum mismatch");
    a.streams.emplace_back(s.begin(), s.end());
  }
  return a;
}

}  // namespace ppress
