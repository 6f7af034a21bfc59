#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "ppress/eblc_bitplane.hpp"
#include "ppress/eblc_pred.hpp"
#include "ppress/error.hpp"
#include "ppress/huffman.hpp"
#include "ppress/lossless.hpp"
#include "ppress/rng.hpp"
#include "ppress/transforms.hpp"

using namespace ppress;

namespace {

std::uint64_t bits_of(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, 8);
  return b;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("huffman: round trip on skewed and single-symbol alphabets") {
  Rng rng(1);
  std::vector<std::uint32_t> sym(5000);
  for (auto& s : sym) s = static_cast<std::uint32_t>(std::min<std::uint64_t>(rng.below(8) * rng.below(8), 40));
  ByteWriter w;
  huffman::encode(sym, w);
  ByteReader r(w.bytes());
  CHECK(huffman::decode(r, sym.size()) == sym);

  const std::vector<std::uint32_t> one(100, 7);
  ByteWriter w1;
  huffman::encode(one, w1);
  ByteReader r1(w1.bytes());
  CHECK(huffman::decode(r1, one.size()) == one);

  const auto book = huffman::build(sym);
  double kraft = 0;
  for (auto len : book.lengths) {
    CHECK(len >= 1);
    CHECK(len <= huffman::kMaxCodeLength);
    kraft += std::ldexp(1.0, -static_cast<int>(len));
  }
  CHECK(kraft <= 1.0 + 1e-12);
}

TEST_CASE("lossless: empty, zeros, random bytes, corruption") {
  for (const auto& name : CodecRegistry::global().names()) {
    CAPTURE(name);
    CHECK(lossless_decode(lossless_encode({}, 1, name), name).empty());
  }
  const Bytes zeros(1 << 20, 0);
  const Bytes z = lossless_encode(zeros);
  CHECK(static_cast<double>(zeros.size()) / static_cast<double>(z.size()) >= 100.0);
  CHECK(lossless_decode(z) == zeros);

  Rng rng(2);
  Bytes noise(200000);
  for (auto& b : noise) b = static_cast<std::uint8_t>(rng.next());
  const Bytes n = lossless_encode(noise);
  CHECK(static_cast<double>(noise.size()) / static_cast<double>(n.size()) >= 0.95);
  CHECK(lossless_decode(n) == noise);

  Bytes text;
  for (int i = 0; i < 3000; ++i) {
    const std::string s = "value " + std::to_string(i % 97) + ";";
    text.insert(text.end(), s.begin(), s.end());
  }
  for (int level = 0; level <= 9; level += 3) {
    const Bytes t = lossless_encode(text, level);
    CHECK(lossless_decode(t) == text);
  }
  Bytes bad = lossless_encode(text);
  bad.resize(bad.size() / 2);
  CHECK_THROWS_AS(lossless_decode(bad), FormatError);
  CHECK_THROWS_AS(lossless_encode(text, 1, "no-such-codec"), ConfigError);
}

TEST_CASE("delta: definition, constant input, round trips") {
  const std::vector<double> v{1, 2, 3};
  CHECK(delta_transform(v, 1) == std::vector<double>{1, 1, 1});
  CHECK(inverse_delta(delta_transform(v, 1), 1) == v);
  CHECK(delta_transform(v, 2) == std::vector<double>{1, 0, 0});
  CHECK(delta_transform(std::vector<double>{4.5, 4.5, 4.5, 4.5}, 1) ==
        std::vector<double>{4.5, 0, 0, 0});

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> bits(1 + rng.below(300));
    for (auto& b : bits) b = rng.next();
    for (int order : {1, 2}) {
      if (bits.size() < static_cast<std::size_t>(order)) continue;
      CHECK(inverse_delta_bits(delta_transform_bits(bits, order), order) == bits);
    }
  }
}

TEST_CASE("half and truncation") {
  CHECK(truncate_value(1.0, 32) == 1.0);
  CHECK(truncate_value(0.1, 32) == static_cast<double>(0.1f));
  CHECK_THROWS_AS(truncate_value(1e39, 32), DataError);
  CHECK_THROWS_AS(truncate_value(1e5, 16), DataError);
  CHECK(half_to_double(double_to_half(1.0)) == 1.0);
  CHECK(half_to_double(double_to_half(65504.0)) == 65504.0);
  CHECK(double_to_half(1.0) == 0x3c00);
  CHECK(half_to_double(0x0001) == std::ldexp(1.0, -24));
  // ties to even: 1 + 2^-11 sits halfway between 1 and 1 + 2^-10
  CHECK(half_to_double(double_to_half(1.0 + std::ldexp(1.0, -11))) == 1.0);
  CHECK(half_to_double(double_to_half(1.0 + 3 * std::ldexp(1.0, -11))) == 1.0 + std::ldexp(1.0, -9));
}

TEST_CASE("sampling: examples") {
  CHECK(sample_rows(5, SampleScheme::naive, 1, 0) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(sample_rows(6, SampleScheme::naive, 2, 0) == std::vector<std::size_t>{0, 2, 4});
  auto wor = sample_rows(1000, SampleScheme::wor, 0.25, 9);
  CHECK(wor.size() == 250);
  CHECK(std::adjacent_find(wor.begin(), wor.end()) == wor.end());
  CHECK(std::is_sorted(wor.begin(), wor.end()));
  CHECK(sample_rows(1000, SampleScheme::wr, 0.25, 9) == sample_rows(1000, SampleScheme::wr, 0.25, 9));
  CHECK_THROWS_AS(sample_rows(10, SampleScheme::wor, 0.01, 1), DataError);
}

TEST_CASE("eblc_pred: constant column codes") {
  const std::vector<double> v{5, 5, 5, 5};
  const auto q = pred::quantize_abs(v, 0.1, DType::f64);
  REQUIRE(q.symbols.size() == 4);
  CHECK_FALSE(pred::abs_code(q.symbols[0]).has_value());
  for (int i = 1; i < 4; ++i) CHECK(pred::abs_code(q.symbols[i]) == std::optional<std::int64_t>(0));
  CHECK(q.reconstruction == v);
}

TEST_CASE("eblc_pred: linear ramp hand simulation") {
  const std::vector<double> v{0, 1, 2, 3};
  const double eb = 0.6;
  const auto q = pred::quantize_abs(v, eb, DType::f64);
  // Oracle: the recurrence pred_{i} = pred_{i-1} + 2 eb round((x_i - pred_{i-1}) / (2 eb)).
  double pred = v[0];
  CHECK_FALSE(pred::abs_code(q.symbols[0]).has_value());
  for (std::size_t i = 1; i < v.size(); ++i) {
    const auto code = std::llround((v[i] - pred) / (2 * eb));
    CHECK(code == 1);
    pred += 2 * eb * static_cast<double>(code);
    CHECK(std::fabs(pred - v[i]) <= eb);
    CHECK(pred::abs_code(q.symbols[i]) == std::optional<std::int64_t>(code));
    CHECK(q.reconstruction[i] == pred);
  }
}

TEST_CASE("eblc_pred: adversarial alternation falls back to literals") {
  std::vector<double> v(4096);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 2 ? -1e9 : 1e9) + static_cast<double>(i);
  const auto q = pred::quantize_abs(v, 1e-9, DType::f64);
  CHECK(q.literals.size() == v.size());
  const Bytes s = pred::encode_abs(v, 1e-9, DType::f64);
  CHECK(static_cast<double>(s.size()) <= 1.05 * 8.0 * static_cast<double>(v.size()));
  const auto back = pred::decode(s, DType::f64);
  CHECK(max_abs_diff(back, v) <= 1e-9);
}

TEST_CASE("eblc_pred: ABS and PW_REL contracts on random data") {
  Rng rng(4);
  for (DType dt : {DType::f64, DType::f32}) {
    std::vector<double> v(3000);
    double walk = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      walk += rng.normal();
      v[i] = round_to(dt, i % 97 == 0 ? 0.0 : (i % 3 == 0 ? rng.uniform(-100, 100) : walk));
    }
    for (double eb : {1.0, 1e-2, 1e-5}) {
      const auto back = pred::decode(pred::encode_abs(v, eb, dt), dt);
      REQUIRE(back.size() == v.size());
      for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::fabs(back[i] - v[i]) <= eb);
      const auto pr = pred::decode(pred::encode_pw_rel(v, eb, dt), dt);
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) {
          CHECK(pr[i] == 0);
        } else {
          CHECK(std::fabs(pr[i] - v[i]) <= eb * std::fabs(v[i]));
        }
      }
    }
    const auto vb = pred::decode(pred::encode_verbatim(v, dt), dt);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(bits_of(vb[i]) == bits_of(v[i]));
  }
}

TEST_CASE("eblc_pred: PW_REL keeps subnormals exactly") {
  const double tiny = std::numeric_limits<double>::denorm_min();
  const std::vector<double> v{tiny, -3 * tiny, 1.0, 2.0, 0.0, -0.0};
  const auto back = pred::decode(pred::encode_pw_rel(v, 1e-3, DType::f64), DType::f64);
  CHECK(back[0] == tiny);
  CHECK(back[1] == -3 * tiny);
  CHECK(back[4] == 0);
  CHECK(std::fabs(back[3] - 2.0) <= 2e-3);
}

TEST_CASE("eblc_pred: decreasing the bound never increases the error") {
  Rng rng(5);
  std::vector<double> v(4096);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.01 * static_cast<double>(i)) + 0.1 * rng.normal();
  double prev = std::numeric_limits<double>::infinity();
  for (double eb = 1.0; eb >= 1e-7; eb /= 10) {
    const double err = max_abs_diff(pred::decode(pred::encode_abs(v, eb, DType::f64), DType::f64), v);
    CHECK(err <= prev);
    CHECK(err <= eb);
    prev = err;
  }
}

TEST_CASE("bitplane: lifting is reversible") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    bitplane::Coefficients c;
    for (auto& x : c) x = static_cast<std::int64_t>(rng.next() >> 4) - (std::int64_t{1} << 59);
    CHECK(bitplane::inverse_lift(bitplane::forward_lift(c)) == c);
  }
}

TEST_CASE("bitplane: zero block is minimal") {
  const std::vector<double> z(4, 0.0);
  for (auto [mode, c] : {std::pair{bitplane::Mode::prec, 10.0}, std::pair{bitplane::Mode::acc, 0.1}}) {
    const Bytes s = bitplane::encode(z, mode, c);
    CHECK(bitplane::payload_bits(s) <= 2);
    CHECK(bitplane::decode(s) == z);
  }
}

TEST_CASE("bitplane: PREC at full width is lossless for a block of one binade") {
  const std::vector<double> v{1.0, 1.5, 1.25, 1.9999999999};
  CHECK(bitplane::decode(bitplane::encode(v, bitplane::Mode::prec, bitplane::kPlanes)) == v);
}

TEST_CASE("bitplane: ACC example and contract") {
  const std::vector<double> v{1.0, 1.5, 2.0, 2.5};
  CHECK(max_abs_diff(bitplane::decode(bitplane::encode(v, bitplane::Mode::acc, 0.01)), v) <= 0.01);

  Rng rng(7);
  std::vector<double> w(1001);
  for (auto& x : w) x = rng.uniform(-1, 1) * std::pow(10.0, rng.uniform(-5, 5));
  for (double eb : {1e2, 1e-1, 1e-4, 1e-8}) {
    const auto back = bitplane::decode(bitplane::encode(w, bitplane::Mode::acc, eb));
    REQUIRE(back.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::fabs(back[i] - w[i]) <= eb);
  }
}

TEST_CASE("bitplane: RATE size is data independent") {
  Rng rng(8);
  std::vector<double> a(4000), b(4000, 0.0);
  for (auto& x : a) x = rng.normal() * 1e3;
  for (double rate : {bitplane::min_rate(), 4.0, 8.0, 16.5}) {
    const auto sa = bitplane::payload_bits(bitplane::encode(a, bitplane::Mode::rate, rate));
    const auto sb = bitplane::payload_bits(bitplane::encode(b, bitplane::Mode::rate, rate));
    CHECK(sa == sb);
    CHECK(sa == 1000 * static_cast<std::uint64_t>(std::llround(4 * rate)));
  }
  CHECK_THROWS_AS(bitplane::encode(a, bitplane::Mode::rate, 1.0), ConfigError);
  CHECK_THROWS_AS(bitplane::encode(a, bitplane::Mode::prec, 0.0), ConfigError);
}

TEST_CASE("bitplane: PREC error shrinks as planes grow") {
  Rng rng(9);
  std::vector<double> v(2000);
  for (auto& x : v) x = rng.normal();
  double prev = std::numeric_limits<double>::infinity();
  for (int planes = 4; planes <= 60; planes += 8) {
    const double err = max_abs_diff(bitplane::decode(bitplane::encode(v, bitplane::Mode::prec, planes)), v);
    CHECK(err <= prev);
    prev = err;
  }
  CHECK(prev < 1e-12);
}
