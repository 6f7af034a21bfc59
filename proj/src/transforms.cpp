#include "ppress/transforms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "ppress/error.hpp"
#include "ppress/rng.hpp"

namespace ppress {

namespace {

void check_order(int order, std::size_t n) {
  if (order != 1 && order != 2) throw ConfigError("delta order must be 1 or 2");
  if (n < static_cast<std::size_t>(order)) throw DataError("sequence shorter than delta order");
}

template <typename T>
void delta_once(std::vector<T>& v) {
  for (std::size_t i = v.size(); i-- > 1;) v[i] = v[i] - v[i - 1];
}

template <typename T>
void prefix_once(std::vector<T>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i] + v[i - 1];
}

}  // namespace

std::vector<double> delta_transform(std::span<const double> values, int order) {
  check_order(order, values.size());
  std::vector<double> v(values.begin(), values.end());
  for (int k = 0; k < order; ++k) delta_once(v);
  return v;
}

std::vector<double> inverse_delta(std::span<const double> values, int order) {
  check_order(order, values.size());
  std::vector<double> v(values.begin(), values.end());
  for (int k = 0; k < order; ++k) prefix_once(v);
  return v;
}

std::vector<std::uint64_t> delta_transform_bits(std::span<const std::uint64_t> bits, int order) {
  check_order(order, bits.size());
  std::vector<std::uint64_t> v(bits.begin(), bits.end());
  for (int k = 0; k < order; ++k) delta_once(v);
  return v;
}

std::vector<std::uint64_t> inverse_delta_bits(std::span<const std::uint64_t> bits, int order) {
  check_order(order, bits.size());
  std::vector<std::uint64_t> v(bits.begin(), bits.end());
  for (int k = 0; k < order; ++k) prefix_once(v);
  return v;
}

// ---------------------------------------------------------------------------

std::uint16_t double_to_half(double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  const auto sign = static_cast<std::uint16_t>((bits >> 48) & 0x8000);
  const double a = std::fabs(v);
  if (std::isnan(v)) return static_cast<std::uint16_t>(sign | 0x7e00);
  if (std::isinf(v)) return static_cast<std::uint16_t>(sign | 0x7c00);
  if (a == 0.0) return sign;
  // Quantum of the target format at this magnitude.
  int e;
  std::frexp(a, &e);  // a = m * 2^e, m in [0.5, 1)
  const int exp_unbiased = e - 1;
  const int q = std::max(exp_unbiased, -14) - 10;  // half has 10 fraction bits
  // nearbyint uses the current (default: to-nearest-even) rounding mode.
  const double scaled = std::nearbyint(std::ldexp(a, -q));
  const double r = std::ldexp(scaled, q);
  if (r >= 65520.0 || r > 65504.0) return static_cast<std::uint16_t>(sign | 0x7c00);
  int re;
  std::frexp(r, &re);
  const int rexp = re - 1;
  if (rexp < -14) {
    // subnormal: value = frac * 2^-24
    const auto frac = static_cast<std::uint16_t>(std::ldexp(r, 24));
    return static_cast<std::uint16_t>(sign | frac);
  }
  const auto frac = static_cast<std::uint16_t>(std::ldexp(r, -rexp + 10) - 1024.0);
  return static_cast<std::uint16_t>(sign | ((rexp + 15) << 10) | frac);
}

double half_to_double(std::uint16_t h) {
  const bool neg = h & 0x8000;
  const int exp = (h >> 10) & 0x1f;
  const int frac = h & 0x3ff;
  double v;
  if (exp == 0) {
    v = std::ldexp(static_cast<double>(frac), -24);
  } else if (exp == 31) {
    v = frac ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
  } else {
    v = std::ldexp(static_cast<double>(frac + 1024), exp - 25);
  }
  return neg ? -v : v;
}

double truncate_value(double v, int target_width) {
  double r;
  if (target_width == 32) {
    r = static_cast<double>(static_cast<float>(v));
  } else if (target_width == 16) {
    r = half_to_double(double_to_half(v));
  } else {
    throw ConfigError("truncation width must be 32 or 16");
  }
  if (std::isfinite(v) && !std::isfinite(r)) {
    throw DataError("value " + std::to_string(v) + " overflows " + std::to_string(target_width) +
                    "-bit float");
  }
  return r;
}

Dataset truncate(const Dataset& d, int target_width) {
  if (target_width == 32 && d.dtype() != DType::f64) {
    throw ConfigError("64->32 truncation requires an f64 dataset");
  }
  std::vector<std::vector<double>> cols(d.n_feat());
  for (std::size_t j = 0; j < d.n_feat(); ++j) {
    auto c = d.column(j);
    cols[j].reserve(c.size());
    for (double v : c) cols[j].push_back(truncate_value(v, target_width));
  }
  return Dataset(std::move(cols), d.names(), d.dtype(), true);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> sample_rows(std::size_t n_obs, SampleScheme scheme, double param,
                                     std::uint64_t seed) {
  std::vector<std::size_t> rows;
  if (scheme == SampleScheme::naive) {
    if (!(param >= 1.0) || param != std::floor(param)) {
      throw ConfigError("naive sampling stride must be an integer >= 1");
    }
    const auto k = static_cast<std::size_t>(param);
    for (std::size_t i = 0; i < n_obs; i += k) rows.push_back(i);
    return rows;
  }
  if (!(param > 0.0 && param <= 1.0)) throw ConfigError("sampling fraction must lie in (0, 1]");
  const auto m = static_cast<std::size_t>(std::llround(param * static_cast<double>(n_obs)));
  if (m == 0) throw DataError("sampling fraction yields an empty sample");
  Rng rng(seed);
  if (scheme == SampleScheme::wr) {
    rows.reserve(m);
    for (std::size_t k = 0; k < m; ++k) rows.push_back(static_cast<std::size_t>(rng.below(n_obs)));
    return rows;
  }
  // Partial Fisher-Yates: first m positions of a random permutation.
  std::vector<std::size_t> perm(n_obs);
  for (std::size_t i = 0; i < n_obs; ++i) perm[i] = i;
  for (std::size_t k = 0; k < m; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.below(n_obs - k));
    std::swap(perm[k], perm[pick]);
  }
  rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(rows.begin(), rows.end());
  return rows;
}

Dataset sample(const Dataset& d, SampleScheme scheme, double param, std::uint64_t seed) {
  const auto rows = sample_rows(d.n_obs(), scheme, param, seed);
  return d.select_rows(rows);
}

}  // namespace ppress
