#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppress/tabular.hpp"

namespace ppress {

// Delta coding in value arithmetic: order 1 emits x1, x2-x1, ...; order 2
// applies order 1 twice. The inverse is a prefix sum and is bit-exact only
// when every intermediate sum is exact.
std::vector<double> delta_transform(std::span<const double> values, int order);
std::vector<double> inverse_delta(std::span<const double> values, int order);

// Same recurrences over IEEE bit patterns with wrap-around integer
// arithmetic; always reversible. Used as the lossless preprocessing stage.
std::vector<std::uint64_t> delta_transform_bits(std::span<const std::uint64_t> bits, int order);
std::vector<std::uint64_t> inverse_delta_bits(std::span<const std::uint64_t> bits, int order);

// IEEE binary16 conversions (round to nearest, ties to even).
std::uint16_t double_to_half(double v);
double half_to_double(std::uint16_t h);

// Rounds to the target width (32 or 16) and widens back. Throws DataError
// when a finite value overflows the target format.
double truncate_value(double v, int target_width);
Dataset truncate(const Dataset& d, int target_width);

enum class SampleScheme : std::uint8_t { naive, wr, wor };

// Row indices kept by a sampling scheme. naive: param is the stride k >= 1;
// wr/wor: param is the fraction in (0, 1] and round(fraction * n_obs) rows
// are drawn. wor indices are returned sorted.
std::vector<std::size_t> sample_rows(std::size_t n_obs, SampleScheme scheme, double param,
                                     std::uint64_t seed);
Dataset sample(const Dataset& d, SampleScheme scheme, double param, std::uint64_t seed);

}  // namespace ppress
