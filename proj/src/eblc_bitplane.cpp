#include "ppress/eblc_bitplane.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "ppress/error.hpp"

namespace ppress::bitplane {

namespace {

constexpr int kTopPlane = kPlanes - 1;
constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

struct EncodeCoder {
  BitWriter& out;
  std::uint64_t budget = kUnlimited;
  std::uint64_t used = 0;
  bool exhausted = false;

  bool bit(bool b) {
    if (used >= budget) {
      exhausted = true;
      return false;
    }
    out.put_bit(b);
    ++used;
    return b;
  }
};

struct DecodeCoder {
  BitReader& in;
  std::uint64_t budget = kUnlimited;
  std::uint64_t used = 0;
  bool exhausted = false;

  bool bit(bool) {
    if (used >= budget) {
      exhausted = true;
      return false;
    }
    ++used;
    return in.get_bit();
  }
};

template <class Coder>
std::uint64_t code_bits(Coder& c, std::uint64_t value, unsigned count) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < count; ++i) {
    if (c.bit((value >> i) & 1u)) v |= std::uint64_t{1} << i;
    if (c.exhausted) break;
  }
  return v;
}

// Shared plane walk. When encoding, `mags`/`neg` hold the coefficient and the
// coder echoes each bit; when decoding they are ignored and rebuilt into
// `out_mags`/`out_neg` from the stream. Both sides take identical branches.
template <class Coder>
void code_planes(Coder& coder, const std::array<std::uint64_t, kBlockSize>& mags,
                 const std::array<bool, kBlockSize>& neg, int min_plane,
                 std::array<std::uint64_t, kBlockSize>& out_mags,
                 std::array<bool, kBlockSize>& out_neg) {
  std::array<bool, kBlockSize> sig{};
  out_mags.fill(0);
  out_neg.fill(false);
  for (int p = kTopPlane; p >= min_plane; --p) {
    const std::uint64_t mask = std::uint64_t{1} << p;
    for (std::size_t i = 0; i < kBlockSize; ++i) {
      if (!sig[i]) continue;
      if (coder.bit(mags[i] & mask)) out_mags[i] |= mask;
      if (coder.exhausted) return;
    }
    std::array<std::size_t, kBlockSize> pending{};
    std::size_t n_pending = 0;
    for (std::size_t i = 0; i < kBlockSize; ++i) {
      if (!sig[i]) pending[n_pending++] = i;
    }
    std::size_t k = 0;
    while (k < n_pending) {
      bool any = false;
      for (std::size_t j = k; j < n_pending; ++j) any |= (mags[pending[j]] & mask) != 0;
      any = coder.bit(any);
      if (coder.exhausted || !any) break;
      for (;;) {
        const std::size_t i = pending[k];
        bool b = true;  // the last pending coefficient is implied by the group bit
        if (k + 1 < n_pending) {
          b = coder.bit(mags[i] & mask);
          if (coder.exhausted) return;
        }
        ++k;
        if (b) {
          out_mags[i] |= mask;
          sig[i] = true;
          out_neg[i] = coder.bit(neg[i]);
          if (coder.exhausted) return;
          break;
        }
      }
    }
    if (coder.exhausted) return;
  }
}

int block_exponent(const std::array<double, kBlockSize>& v) {
  int emax = std::numeric_limits<int>::min();
  for (double x : v) {
    if (x == 0.0) continue;
    int e;
    std::frexp(x, &e);
    emax = std::max(emax, e);
  }
  return emax;
}

struct Block {
  std::array<std::uint64_t, kBlockSize> mags{};
  std::array<bool, kBlockSize> neg{};
};

Block to_block(const std::array<double, kBlockSize>& v, int emax) {
  Coefficients fixed{};
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    fixed[i] = std::llround(std::ldexp(v[i], kFixedBits - emax));
  }
  const Coefficients c = forward_lift(fixed);
  Block b;
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    b.neg[i] = c[i] < 0;
    b.mags[i] = c[i] < 0 ? static_cast<std::uint64_t>(-c[i]) : static_cast<std::uint64_t>(c[i]);
  }
  return b;
}

std::array<double, kBlockSize> from_block(const std::array<std::uint64_t, kBlockSize>& mags,
                                          const std::array<bool, kBlockSize>& neg, int emax,
                                          DType dtype) {
  Coefficients c{};
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    const auto m = static_cast<std::int64_t>(mags[i] & ((std::uint64_t{1} << kPlanes) - 1));
    c[i] = neg[i] ? -m : m;
  }
  const Coefficients fixed = inverse_lift(c);
  std::array<double, kBlockSize> out{};
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    out[i] = round_to(dtype, std::ldexp(static_cast<double>(fixed[i]), emax - kFixedBits));
  }
  return out;
}

template <class Coder>
void code_verbatim(Coder& coder, std::array<double, kBlockSize>& v, DType dtype) {
  for (auto& x : v) {
    if (dtype == DType::f64) {
      x = std::bit_cast<double>(code_bits(coder, std::bit_cast<std::uint64_t>(x), 64));
    } else {
      const auto bits = static_cast<std::uint32_t>(
          code_bits(coder, std::bit_cast<std::uint32_t>(static_cast<float>(x)), 32));
      x = std::bit_cast<float>(bits);
    }
  }
}

struct ModeParams {
  Mode mode;
  double c;
  std::uint64_t budget;  // RATE only
  int prec_min_plane;    // PREC only
};

bool within(const std::array<double, kBlockSize>& a, const std::array<double, kBlockSize>& b,
            double eb) {
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    if (!(std::fabs(a[i] - b[i]) <= eb)) return false;
  }
  return true;
}

// Block layout: nonzero flag; [ACC: verbatim flag]; exponent; [ACC: lowest
// kept plane, 6 bits]; planes.
void encode_block(BitWriter& out, const std::array<double, kBlockSize>& v,
                  const ModeParams& mp, DType dtype);

std::array<double, kBlockSize> decode_block(BitReader& in, const ModeParams& mp, DType dtype) {
  std::array<double, kBlockSize> out{};
  DecodeCoder coder{in, mp.mode == Mode::rate ? mp.budget : kUnlimited};
  const bool nonzero = coder.bit(false);
  if (nonzero && !coder.exhausted) {
    bool verbatim = false;
    if (mp.mode == Mode::acc) verbatim = coder.bit(false);
    if (verbatim) {
      code_verbatim(coder, out, dtype);
    } else {
      const auto biased = code_bits(coder, 0, kExponentBits);
      if (!coder.exhausted) {
        const int emax = static_cast<int>(biased) - kExponentBias;
        int min_plane = 0;
        if (mp.mode == Mode::prec) min_plane = mp.prec_min_plane;
        if (mp.mode == Mode::acc) min_plane = static_cast<int>(code_bits(coder, 0, 6));
        std::array<std::uint64_t, kBlockSize> mags{}, om{};
        std::array<bool, kBlockSize> ng{}, on{};
        code_planes(coder, mags, ng, min_plane, om, on);
        out = from_block(om, on, emax, dtype);
      }
    }
  }
  if (mp.mode == Mode::rate) {
    while (coder.used < mp.budget) {
      in.get_bit();
      ++coder.used;
    }
  }
  return out;
}

void emit_planes(BitWriter& out, const Block& b, int emax, int min_plane, bool acc) {
  EncodeCoder coder{out};
  coder.bit(true);
  if (acc) coder.bit(false);
  code_bits(coder, static_cast<std::uint64_t>(emax + kExponentBias), kExponentBits);
  if (acc) code_bits(coder, static_cast<std::uint64_t>(min_plane), 6);
  std::array<std::uint64_t, kBlockSize> om{};
  std::array<bool, kBlockSize> on{};
  code_planes(coder, b.mags, b.neg, min_plane, om, on);
}

void copy_bits(BitWriter& dst, const BitWriter& src) {
  BitReader r(src.bytes());
  for (std::uint64_t i = 0; i < src.bit_count(); ++i) dst.put_bit(r.get_bit());
}

void encode_block(BitWriter& out, const std::array<double, kBlockSize>& v, const ModeParams& mp,
                  DType dtype) {
  const int emax = block_exponent(v);
  if (mp.mode == Mode::rate) {
    EncodeCoder coder{out, mp.budget};
    const bool nonzero = emax != std::numeric_limits<int>::min();
    coder.bit(nonzero);
    if (nonzero) {
      code_bits(coder, static_cast<std::uint64_t>(emax + kExponentBias), kExponentBits);
      const Block b = to_block(v, emax);
      std::array<std::uint64_t, kBlockSize> om{};
      std::array<bool, kBlockSize> on{};
      code_planes(coder, b.mags, b.neg, 0, om, on);
    }
    while (coder.used < mp.budget) {
      out.put_bit(false);
      ++coder.used;
    }
    return;
  }
  if (mp.mode == Mode::prec) {
    if (emax == std::numeric_limits<int>::min()) {
      out.put_bit(false);
      return;
    }
    emit_planes(out, to_block(v, emax), emax, mp.prec_min_plane, false);
    return;
  }

  // ACC
  const double eb = mp.c;
  double maxabs = 0;
  for (double x : v) maxabs = std::max(maxabs, std::fabs(x));
  if (maxabs <= eb) {
    out.put_bit(false);
    return;
  }
  const Block b = to_block(v, emax);
  // Truncating planes below m perturbs each coefficient by < 2^m; two inverse
  // lifting levels amplify that to < 4 * 2^m + 3 fixed-point units.
  const double eb_fixed = std::ldexp(eb, kFixedBits - emax);
  int m = 0;
  if (eb_fixed > 7.0) m = static_cast<int>(std::floor(std::log2((eb_fixed - 3.0) / 4.0)));
  m = std::clamp(m, 0, kPlanes);
  const ModeParams check{Mode::acc, eb, 0, 0};
  for (; m >= 0; --m) {
    BitWriter trial;
    emit_planes(trial, b, emax, m, true);
    BitReader r(trial.bytes());
    if (within(decode_block(r, check, dtype), v, eb)) {
      copy_bits(out, trial);
      return;
    }
  }
  EncodeCoder coder{out};
  coder.bit(true);
  coder.bit(true);
  auto copy = v;
  code_verbatim(coder, copy, dtype);
}

ModeParams make_params(Mode mode, double c) {
  ModeParams mp{mode, c, 0, 0};
  switch (mode) {
    case Mode::prec: {
      if (!(c >= 1.0)) throw ConfigError("PREC needs at least one bit plane");
      const int planes = static_cast<int>(std::min<double>(std::floor(c), kPlanes));
      mp.prec_min_plane = kPlanes - planes;
      break;
    }
    case Mode::rate: {
      if (!(c >= min_rate()) || !std::isfinite(c)) {
        throw ConfigError("RATE must be at least " + std::to_string(min_rate()) + " bits/value");
      }
      mp.budget = static_cast<std::uint64_t>(std::llround(c * static_cast<double>(kBlockSize)));
      break;
    }
    case Mode::acc:
      if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("ACC bound must be positive");
      break;
  }
  return mp;
}

}  // namespace

double min_rate() { return static_cast<double>(1 + kExponentBits) / kBlockSize; }

Coefficients forward_lift(const Coefficients& v) {
  const std::int64_t d0 = v[0] - v[1];
  const std::int64_t s0 = v[1] + (d0 >> 1);
  const std::int64_t d1 = v[2] - v[3];
  const std::int64_t s1 = v[3] + (d1 >> 1);
  const std::int64_t dd = s0 - s1;
  const std::int64_t ss = s1 + (dd >> 1);
  return {ss, dd, d0, d1};
}

Coefficients inverse_lift(const Coefficients& c) {
  const std::int64_t ss = c[0], dd = c[1], d0 = c[2], d1 = c[3];
  const std::int64_t s1 = ss - (dd >> 1);
  const std::int64_t s0 = dd + s1;
  const std::int64_t v1 = s0 - (d0 >> 1);
  const std::int64_t v0 = d0 + v1;
  const std::int64_t v3 = s1 - (d1 >> 1);
  const std::int64_t v2 = d1 + v3;
  return {v0, v1, v2, v3};
}

// Stream: u8 mode, f64 c, varint n, varint payload bits, payload.
Bytes encode(std::span<const double> values, Mode mode, double c, DType dtype) {
  const ModeParams mp = make_params(mode, c);
  BitWriter bits;
  const std::size_t n = values.size();
  for (std::size_t start = 0; start < n; start += kBlockSize) {
    std::array<double, kBlockSize> blk{};
    for (std::size_t i = 0; i < kBlockSize; ++i) {
      blk[i] = values[std::min(start + i, n - 1)];
    }
    encode_block(bits, blk, mp, dtype);
  }
  ByteWriter w;
  w.put_u8(static_cast<std::uint8_t>(mode));
  w.put_f64(c);
  w.put_varint(n);
  w.put_varint(bits.bit_count());
  w.put_bytes(bits.bytes());
  return w.take();
}

std::vector<double> decode(ByteSpan stream, DType dtype) {
  ByteReader r(stream);
  const auto mode_raw = r.get_u8();
  if (mode_raw > 2) throw FormatError("unknown bit-plane mode");
  const auto mode = static_cast<Mode>(mode_raw);
  const double c = r.get_f64();
  const auto n = static_cast<std::size_t>(r.get_varint());
  const auto nbits = r.get_varint();
  const ByteSpan payload = r.get_bytes(r.remaining());
  if ((nbits + 7) / 8 != payload.size()) throw FormatError("bit-plane payload size mismatch");
  ModeParams mp;
  try {
    mp = make_params(mode, c);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad bit-plane header: ") + e.what());
  }
  BitReader in(payload);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t start = 0; start < n; start += kBlockSize) {
    const auto blk = decode_block(in, mp, dtype);
    for (std::size_t i = 0; i < kBlockSize && start + i < n; ++i) out.push_back(blk[i]);
  }
  if (in.bit_position() != nbits) throw FormatError("bit-plane payload length mismatch");
  return out;
}

std::uint64_t payload_bits(ByteSpan stream) {
  ByteReader r(stream);
  r.get_u8();
  r.get_f64();
  r.get_varint();
  return r.get_varint();
}

}  // namespace ppress::bitplane
