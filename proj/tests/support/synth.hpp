#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ppress/rng.hpp"
#include "ppress/tabular.hpp"

namespace ppress::testing {

// Mixed smooth/rough column: a random-phase sinusoid plus a random walk,
// with a per-column choice of noise level and offset.
inline std::vector<double> random_column(Rng& rng, std::size_t n) {
  const int kind = static_cast<int>(rng.below(4));
  const double scale = std::pow(10.0, rng.uniform(-3, 4));
  const double offset = rng.uniform(-1, 1) * scale * (rng.below(2) ? 10 : 0);
  const double period = rng.uniform(20, 2000);
  const double phase = rng.uniform(0, 6.283185307179586);
  std::vector<double> v(n);
  double walk = 0;
  for (std::size_t i = 0; i < n; ++i) {
    walk += rng.normal();
    double x = 0;
    switch (kind) {
      case 0: x = std::sin(phase + 6.283185307179586 * static_cast<double>(i) / period); break;
      case 1: x = walk / 30.0; break;
      case 2: x = rng.uniform(-1, 1); break;
      default: x = std::sin(phase + 6.283185307179586 * static_cast<double>(i) / period) + 0.2 * rng.normal(); break;
    }
    v[i] = offset + scale * x;
  }
  return v;
}

// Desk-scale stand-in for a scientific training table: a rank-5 latent
// signal that varies smoothly along the rows, per-column scales spanning four
// decades, and 5% Gaussian noise. Column 0 is the regression target.
inline Dataset latent_dataset(std::size_t n_obs = 10000, std::size_t n_feat = 50,
                              std::uint64_t seed = 7, double noise = 0.05) {
  Rng rng(seed);
  const std::size_t rank = 5;
  std::vector<std::vector<double>> factors(rank, std::vector<double>(n_obs));
  for (std::size_t k = 0; k < rank; ++k) {
    const double p1 = rng.uniform(400, 4000), p2 = rng.uniform(80, 400);
    const double a1 = rng.uniform(0, 6.283185307179586), a2 = rng.uniform(0, 6.283185307179586);
    for (std::size_t i = 0; i < n_obs; ++i) {
      const double t = static_cast<double>(i);
      factors[k][i] = std::sin(a1 + 6.283185307179586 * t / p1) + 0.5 * std::sin(a2 + 6.283185307179586 * t / p2);
    }
  }
  std::vector<std::vector<double>> cols(n_feat, std::vector<double>(n_obs));
  for (std::size_t j = 0; j < n_feat; ++j) {
    std::vector<double> w(rank);
    for (auto& x : w) x = rng.normal();
    const double scale = std::pow(10.0, 4.0 * static_cast<double>(j) / static_cast<double>(n_feat - 1));
    double sig = 0;
    for (double x : w) sig += x * x;
    sig = std::sqrt(sig * 0.625);  // per-factor variance of the two sinusoids
    for (std::size_t i = 0; i < n_obs; ++i) {
      double s = 0;
      for (std::size_t k = 0; k < rank; ++k) s += w[k] * factors[k][i];
      cols[j][i] = scale * (s + noise * sig * rng.normal());
    }
  }
  return Dataset(std::move(cols));
}

}  // namespace ppress::testing
