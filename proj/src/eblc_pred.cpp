#include "ppress/eblc_pred.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "ppress/error.hpp"
#include "ppress/huffman.hpp"
#include "ppress/lossless.hpp"

namespace ppress::pred {

namespace {

constexpr std::uint8_t kVariantAbs = 0;
constexpr std::uint8_t kVariantPwRel = 1;
constexpr std::uint8_t kVariantVerbatim = 2;

inline double reconstruct(double pred, double step, std::int64_t q, DType dtype) {
  return round_to(dtype, pred + step * static_cast<double>(q));
}

void put_value(ByteWriter& w, double v, DType dtype) {
  if (dtype == DType::f64) {
    w.put(v);
  } else {
    w.put(static_cast<float>(v));
  }
}

double get_value(ByteReader& r, DType dtype) {
  return dtype == DType::f64 ? r.get<double>() : static_cast<double>(r.get<float>());
}

double default_floor(DType dtype) {
  return dtype == DType::f64 ? std::numeric_limits<double>::min()
                             : static_cast<double>(std::numeric_limits<float>::min());
}

void check_cap(std::uint32_t cap) {
  if (cap < 2 || cap > (1u << 30)) throw ConfigError("quant_bin_cap must lie in [2, 2^30]");
}

}  // namespace

std::optional<std::int64_t> abs_code(std::uint32_t symbol, std::uint32_t cap) {
  if (symbol == kLiteral) return std::nullopt;
  return static_cast<std::int64_t>(symbol) - 1 - (static_cast<std::int64_t>(cap) - 1);
}

Quantized quantize_abs(std::span<const double> values, double eb, DType dtype,
                       std::uint32_t cap) {
  if (!(eb > 0.0) || !std::isfinite(eb)) throw ConfigError("error bound must be positive");
  check_cap(cap);
  Quantized out;
  out.symbols.reserve(values.size());
  out.reconstruction.reserve(values.size());
  const double step = 2.0 * eb;
  const double limit = static_cast<double>(cap) - 0.5;
  const auto offset = static_cast<std::int64_t>(cap);  // symbol = q + cap, q in (-cap, cap)
  double pred = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    double recon = x;
    bool coded = false;
    if (i > 0) {
      const double diff = (x - pred) / step;
      if (std::fabs(diff) < limit) {
        const auto q = static_cast<std::int64_t>(std::llround(diff));
        recon = reconstruct(pred, step, q, dtype);
        if (std::fabs(recon - x) <= eb) {
          out.symbols.push_back(static_cast<std::uint32_t>(q + offset));
          coded = true;
        }
      }
      if (!coded) {
        // Unpredictable value: snap to the global grid when that stays in bound.
        const double snapped = round_to(dtype, step * std::nearbyint(x / step));
        recon = (std::isfinite(snapped) && std::fabs(snapped - x) <= eb) ? snapped : x;
      }
    }
    if (!coded) {
      out.symbols.push_back(kLiteral);
      out.literals.push_back(recon);
    }
    out.reconstruction.push_back(recon);
    pred = recon;
  }
  return out;
}

Quantized quantize_pw_rel(std::span<const double> values, double pw, DType dtype,
                          std::uint32_t cap, double zero_floor) {
  if (!(pw > 0.0) || !std::isfinite(pw)) throw ConfigError("point-wise bound must be positive");
  check_cap(cap);
  if (zero_floor <= 0.0) zero_floor = default_floor(dtype);
  Quantized out;
  out.symbols.reserve(values.size());
  out.reconstruction.reserve(values.size());
  const double step = 2.0 * std::log2(1.0 + pw);
  const double limit = static_cast<double>(cap) - 0.5;
  const auto offset = static_cast<std::int64_t>(cap) + 1;  // symbol = q + cap + 1
  double pred = 0.0;
  for (double x : values) {
    if (x == 0.0) {
      out.symbols.push_back(kZero);
      out.reconstruction.push_back(0.0);
      continue;
    }
    const double ax = std::fabs(x);
    bool coded = false;
    if (ax >= zero_floor) {
      const double y = std::log2(ax);
      const double diff = (y - pred) / step;
      if (std::fabs(diff) < limit) {
        const auto q = static_cast<std::int64_t>(std::llround(diff));
        const double ylog = pred + step * static_cast<double>(q);
        const double mag = round_to(dtype, std::exp2(ylog));
        const double recon = x < 0 ? -mag : mag;
        if (std::isfinite(recon) && mag != 0.0 && std::fabs(recon - x) <= pw * ax) {
          out.symbols.push_back(static_cast<std::uint32_t>(q + offset));
          out.negative.push_back(x < 0);
          out.reconstruction.push_back(recon);
          pred = ylog;
          coded = true;
        }
      }
    }
    if (!coded) {
      out.symbols.push_back(kLiteral);
      out.literals.push_back(x);
      out.reconstruction.push_back(x);
      if (ax >= zero_floor) pred = std::log2(ax);
    }
  }
  return out;
}

Bytes encode_abs(std::span<const double> values, double eb, DType dtype, const Params& p) {
  const Quantized qz = quantize_abs(values, eb, dtype, p.quant_bin_cap);
  ByteWriter payload;
  huffman::encode(qz.symbols, payload);
  for (double v : qz.literals) put_value(payload, v, dtype);

  ByteWriter w;
  w.put_u8(kVariantAbs);
  w.put_varint(values.size());
  w.put_f64(eb);
  w.put_u32(p.quant_bin_cap);
  w.put_varint(qz.literals.size());
  w.put_blob(lossless_encode(payload.bytes(), p.codec_level));
  return w.take();
}

Bytes encode_pw_rel(std::span<const double> values, double pw, DType dtype, const Params& p) {
  const double floor = p.zero_floor > 0.0 ? p.zero_floor : default_floor(dtype);
  const Quantized qz = quantize_pw_rel(values, pw, dtype, p.quant_bin_cap, floor);
  ByteWriter payload;
  huffman::encode(qz.symbols, payload);
  for (double v : qz.literals) put_value(payload, v, dtype);
  BitWriter signs;
  for (bool s : qz.negative) signs.put_bit(s);
  payload.put_blob(signs.bytes());

  ByteWriter w;
  w.put_u8(kVariantPwRel);
  w.put_varint(values.size());
  w.put_f64(pw);
  w.put_f64(floor);
  w.put_u32(p.quant_bin_cap);
  w.put_varint(qz.literals.size());
  w.put_varint(qz.negative.size());
  w.put_blob(lossless_encode(payload.bytes(), p.codec_level));
  return w.take();
}

Bytes encode_verbatim(std::span<const double> values, DType dtype, const Params& p) {
  ByteWriter raw;
  for (double v : values) put_value(raw, v, dtype);
  ByteWriter w;
  w.put_u8(kVariantVerbatim);
  w.put_varint(values.size());
  w.put_blob(lossless_encode(raw.bytes(), p.codec_level));
  return w.take();
}

std::vector<double> decode(ByteSpan stream, DType dtype) {
  ByteReader r(stream);
  const auto variant = r.get_u8();
  const auto n = static_cast<std::size_t>(r.get_varint());
  std::vector<double> out;
  out.reserve(n);

  if (variant == kVariantVerbatim) {
    const Bytes raw = lossless_decode(r.get_blob());
    ByteReader vr(raw);
    for (std::size_t i = 0; i < n; ++i) out.push_back(get_value(vr, dtype));
    if (!vr.at_end()) throw FormatError("verbatim column length mismatch");
    return out;
  }

  if (variant == kVariantAbs) {
    const double eb = r.get_f64();
    const auto cap = r.get_u32();
    const auto n_lit = r.get_varint();
    check_cap(cap);
    const Bytes payload = lossless_decode(r.get_blob());
    ByteReader pr(payload);
    const auto symbols = huffman::decode(pr, n);
    const double step = 2.0 * eb;
    const auto offset = static_cast<std::int64_t>(cap);
    double pred = 0.0;
    std::uint64_t lits = 0;
    for (auto s : symbols) {
      double recon;
      if (s == kLiteral) {
        recon = get_value(pr, dtype);
        ++lits;
      } else {
        const std::int64_t q = static_cast<std::int64_t>(s) - offset;
        if (q <= -offset || q >= offset) throw FormatError("quantization code out of range");
        recon = reconstruct(pred, step, q, dtype);
      }
      out.push_back(recon);
      pred = recon;
    }
    if (lits != n_lit || !pr.at_end()) throw FormatError("literal count mismatch");
    return out;
  }

  if (variant == kVariantPwRel) {
    const double pw = r.get_f64();
    const double floor = r.get_f64();
    const auto cap = r.get_u32();
    const auto n_lit = r.get_varint();
    const auto n_signs = r.get_varint();
    check_cap(cap);
    const Bytes payload = lossless_decode(r.get_blob());
    ByteReader pr(payload);
    const auto symbols = huffman::decode(pr, n);
    std::vector<double> literals;
    for (std::uint64_t k = 0; k < n_lit; ++k) literals.push_back(get_value(pr, dtype));
    BitReader signs(pr.get_blob());
    if (!pr.at_end()) throw FormatError("trailing PW_REL payload");
    const double step = 2.0 * std::log2(1.0 + pw);
    const auto offset = static_cast<std::int64_t>(cap) + 1;
    double pred = 0.0;
    std::size_t lit = 0;
    std::uint64_t nsign = 0;
    for (auto s : symbols) {
      if (s == kZero) {
        out.push_back(0.0);
      } else if (s == kLiteral) {
        if (lit >= literals.size()) throw FormatError("literal stream overrun");
        const double x = literals[lit++];
        out.push_back(x);
        if (std::fabs(x) >= floor) pred = std::log2(std::fabs(x));
      } else {
        const std::int64_t q = static_cast<std::int64_t>(s) - offset;
        if (q < -static_cast<std::int64_t>(cap) || q > static_cast<std::int64_t>(cap)) {
          throw FormatError("quantization code out of range");
        }
        const double ylog = pred + step * static_cast<double>(q);
        const double mag = round_to(dtype, std::exp2(ylog));
        const bool neg = signs.get_bit();
        ++nsign;
        out.push_back(neg ? -mag : mag);
        pred = ylog;
      }
    }
    if (lit != literals.size() || nsign != n_signs) throw FormatError("PW_REL stream mismatch");
    return out;
  }

  throw FormatError("unknown predictive stream variant");
}

}  // namespace ppress::pred
