#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ppress/bytes.hpp"
#include "ppress/tabular.hpp"

// Block-transform bit-plane coding of a 1-D value stream.
//
// Values are cut into blocks of four (the trailing block is padded by
// repeating the last value). Each block is aligned to its largest binary
// exponent as 60-bit fixed-point integers, decorrelated by two levels of
// reversible integer Haar lifting, and its coefficient magnitudes are
// emitted plane by plane from the most significant plane down with group
// tests for not-yet-significant coefficients and a sign bit at first
// significance.
//
//   PREC  keeps the c most significant of the 62 coefficient planes.
//   RATE  spends exactly round(4 * c) bits per block, header included.
//   ACC   picks the lowest kept plane per block so that the reconstruction
//         error stays <= c; the encoder verifies each block and falls back
//         to verbatim storage when rounding would break the bound.
namespace ppress::bitplane {

enum class Mode : std::uint8_t { prec = 0, rate = 1, acc = 2 };

inline constexpr std::size_t kBlockSize = 4;
inline constexpr int kPlanes = 62;
inline constexpr int kFixedBits = 60;
inline constexpr unsigned kExponentBits = 12;
inline constexpr int kExponentBias = 1100;

// Smallest RATE value whose per-block budget covers the block header.
double min_rate();

using Coefficients = std::array<std::int64_t, kBlockSize>;
Coefficients forward_lift(const Coefficients& v);
Coefficients inverse_lift(const Coefficients& c);

Bytes encode(std::span<const double> values, Mode mode, double c, DType dtype = DType::f64);
std::vector<double> decode(ByteSpan stream, DType dtype = DType::f64);

// Bits occupied by the block payload (excluding the stream header).
std::uint64_t payload_bits(ByteSpan stream);

}  // namespace ppress::bitplane
