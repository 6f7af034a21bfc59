#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ppress/bytes.hpp"
#include "ppress/tabular.hpp"

// Prediction-based error-bounded coding of one value stream.
//
// Each value is predicted from the previously *reconstructed* value
// (1-D Lorenzo), the residual is quantized on a grid of width 2*eb and the
// quantization codes are Huffman coded. Values whose code would reach the
// bin cap, or whose reconstruction misses the bound in floating point,
// become literals stored as raw IEEE bytes. The combined payload is passed
// through the lossless coder.
namespace ppress::pred {

struct Params {
  std::uint32_t quant_bin_cap = 65536;
  int codec_level = 1;
  // PW_REL: magnitudes below this are stored as exact literals (0 picks the
  // smallest positive normal of the stream dtype).
  double zero_floor = 0.0;
};

inline constexpr std::uint32_t kLiteral = 0;
inline constexpr std::uint32_t kZero = 1;  // PW_REL only

// Quantizer output before entropy coding; exposed for inspection and tests.
struct Quantized {
  std::vector<std::uint32_t> symbols;
  std::vector<double> literals;
  std::vector<bool> negative;  // PW_REL: sign of each coded (non-literal, non-zero) value
  std::vector<double> reconstruction;
};

Quantized quantize_abs(std::span<const double> values, double eb, DType dtype,
                       std::uint32_t quant_bin_cap = 65536);
Quantized quantize_pw_rel(std::span<const double> values, double pw, DType dtype,
                          std::uint32_t quant_bin_cap = 65536, double zero_floor = 0.0);

// Quantization code carried by an ABS symbol, nullopt for a literal.
std::optional<std::int64_t> abs_code(std::uint32_t symbol, std::uint32_t quant_bin_cap = 65536);

Bytes encode_abs(std::span<const double> values, double eb, DType dtype, const Params& p = {});
Bytes encode_pw_rel(std::span<const double> values, double pw, DType dtype, const Params& p = {});
// Lossless fallback used for zero-range columns under REL/PSNR.
Bytes encode_verbatim(std::span<const double> values, DType dtype, const Params& p = {});

std::vector<double> decode(ByteSpan stream, DType dtype);

}  // namespace ppress::pred
