#include "ppress/reducers.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>

#include "ppress/eblc_bitplane.hpp"
#include "ppress/eblc_pred.hpp"
#include "ppress/error.hpp"
#include "ppress/transforms.hpp"

namespace ppress {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::none: return "NONE";
    case Method::lossless: return "LOSSLESS";
    case Method::eblc_pred: return "EBLC_PRED";
    case Method::eblc_bitplane: return "EBLC_BITPLANE";
    case Method::trunc: return "TRUNC";
    case Method::sample_naive: return "SAMPLE_NAIVE";
    case Method::sample_wr: return "SAMPLE_WR";
    case Method::sample_wor: return "SAMPLE_WOR";
  }
  return "?";
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::none: return "NONE";
    case Mode::abs: return "ABS";
    case Mode::rel: return "REL";
    case Mode::pw_rel: return "PW_REL";
    case Mode::psnr: return "PSNR";
    case Mode::prec: return "PREC";
    case Mode::acc: return "ACC";
    case Mode::rate: return "RATE";
  }
  return "?";
}

std::string_view to_string(Layout l) { return l == Layout::by_column ? "by_column" : "matrix"; }

Method parse_method(std::string_view s) {
  const std::string u = upper(s);
  if (u == "NONE") return Method::none;
  if (u == "LOSSLESS") return Method::lossless;
  if (u == "EBLC_PRED" || u == "SZ") return Method::eblc_pred;
  if (u == "EBLC_BITPLANE" || u == "ZFP") return Method::eblc_bitplane;
  if (u == "TRUNC") return Method::trunc;
  if (u == "SAMPLE_NAIVE") return Method::sample_naive;
  if (u == "SAMPLE_WR") return Method::sample_wr;
  if (u == "SAMPLE_WOR") return Method::sample_wor;
  throw ConfigError("unknown method: " + std::string(s));
}

Mode parse_mode(std::string_view s) {
  const std::string u = upper(s);
  if (u.empty() || u == "NONE") return Mode::none;
  if (u == "ABS") return Mode::abs;
  if (u == "REL") return Mode::rel;
  if (u == "PW_REL") return Mode::pw_rel;
  if (u == "PSNR") return Mode::psnr;
  if (u == "PREC") return Mode::prec;
  if (u == "ACC") return Mode::acc;
  if (u == "RATE") return Mode::rate;
  throw ConfigError("unknown mode: " + std::string(s));
}

Layout parse_layout(std::string_view s) {
  if (s == "by_column" || s == "column") return Layout::by_column;
  if (s == "matrix") return Layout::matrix;
  throw ConfigError("unknown layout: " + std::string(s));
}

bool is_sampling(Method m) {
  return m == Method::sample_naive || m == Method::sample_wr || m == Method::sample_wor;
}

void ReducerConfig::validate() const {
  auto need_bound = [&](const char* what) {
    if (bound.empty() || !std::isfinite(bound[0])) {
      throw ConfigError(std::string(to_string(method)) + " needs " + what);
    }
    return bound[0];
  };
  auto require_mode = [&](std::initializer_list<Mode> allowed) {
    for (Mode m : allowed) {
      if (m == mode) return;
    }
    throw ConfigError("mode " + std::string(to_string(mode)) + " is not valid for " +
                      std::string(to_string(method)));
  };
  switch (method) {
    case Method::none:
      require_mode({Mode::none});
      break;
    case Method::lossless:
      require_mode({Mode::none});
      if (fixed.delta_order < 0 || fixed.delta_order > 2) {
        throw ConfigError("delta_order must be 0, 1 or 2");
      }
      CodecRegistry::global().get(fixed.codec);
      break;
    case Method::eblc_pred: {
      require_mode({Mode::abs, Mode::rel, Mode::pw_rel, Mode::psnr});
      const double b = need_bound("an error bound");
      if (!(b > 0)) throw ConfigError("error bounds must be > 0");
      if (fixed.quant_bin_cap < 2) throw ConfigError("quant_bin_cap must be >= 2");
      break;
    }
    case Method::eblc_bitplane: {
      require_mode({Mode::prec, Mode::acc, Mode::rate});
      const double b = need_bound("a precision, rate or accuracy");
      if (fixed.block_size != bitplane::kBlockSize) {
        throw ConfigError("bit-plane block_size is fixed at 4");
      }
      if (mode == Mode::prec && !(b >= 1)) throw ConfigError("PREC needs >= 1 bit plane");
      if (mode == Mode::rate && !(b >= bitplane::min_rate())) {
        throw ConfigError("RATE must be >= " + std::to_string(bitplane::min_rate()));
      }
      if (mode == Mode::acc && !(b > 0)) throw ConfigError("ACC bound must be > 0");
      break;
    }
    case Method::trunc: {
      require_mode({Mode::none});
      const double b = need_bound("a target width");
      if (b != 32 && b != 16) throw ConfigError("truncation width must be 32 or 16");
      break;
    }
    case Method::sample_naive: {
      require_mode({Mode::none});
      const double b = need_bound("a stride");
      if (!(b >= 1) || b != std::floor(b)) throw ConfigError("stride must be an integer >= 1");
      break;
    }
    case Method::sample_wr:
    case Method::sample_wor: {
      require_mode({Mode::none});
      const double b = need_bound("a fraction");
      if (!(b > 0 && b <= 1)) throw ConfigError("sampling fraction must lie in (0, 1]");
      break;
    }
  }
}

std::string ReducerConfig::label() const {
  std::string s(to_string(method));
  if (mode != Mode::none) s += "/" + std::string(to_string(mode));
  if (layout == Layout::matrix && !is_sampling(method)) s += "@matrix";
  if (method == Method::lossless && fixed.delta_order > 0) {
    s += "+delta" + std::to_string(fixed.delta_order);
  }
  return s;
}

ReducerConfig ReducerConfig::with_bound(double b) const {
  ReducerConfig c = *this;
  if (c.bound.empty()) {
    c.bound.push_back(b);
  } else {
    c.bound[0] = b;
  }
  return c;
}

std::optional<double> resolve_bound(Mode mode, double value, const ColumnStats* stats) {
  if (!(value > 0) || !std::isfinite(value)) throw ConfigError("bound value must be > 0");
  switch (mode) {
    case Mode::abs:
    case Mode::acc:
      return value;
    case Mode::rel:
      if (stats == nullptr) throw ConfigError("REL needs column statistics");
      if (stats->zero_range) return std::nullopt;
      return value * stats->range;
    case Mode::psnr:
      // Uniform quantization error on [-eb, eb] has MSE eb^2 / 3.
      if (stats == nullptr) throw ConfigError("PSNR needs column statistics");
      if (stats->zero_range) return std::nullopt;
      return std::sqrt(3.0) * stats->range * std::pow(10.0, -value / 20.0);
    case Mode::pw_rel:
      return kPerValueBound;
    default:
      throw ConfigError("mode " + std::string(to_string(mode)) + " has no absolute bound");
  }
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

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

std::uint64_t value_bits(double v, DType dtype) {
  return dtype == DType::f64 ? std::bit_cast<std::uint64_t>(v)
                             : std::bit_cast<std::uint32_t>(static_cast<float>(v));
}

double bits_value(std::uint64_t b, DType dtype) {
  return dtype == DType::f64 ? std::bit_cast<double>(b)
                             : static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(b)));
}

Bytes raw_stream(std::span<const double> values, DType dtype) {
  ByteWriter w;
  for (double v : values) put_value(w, v, dtype);
  return w.take();
}

// Stream: u8 delta order, string codec name, blob.
Bytes lossless_stream(std::span<const double> values, DType dtype, const FixedParams& fp) {
  ByteWriter raw;
  if (fp.delta_order > 0 && values.size() >= static_cast<std::size_t>(fp.delta_order)) {
    std::vector<std::uint64_t> bits;
    bits.reserve(values.size());
    for (double v : values) bits.push_back(value_bits(v, dtype));
    for (auto b : delta_transform_bits(bits, fp.delta_order)) {
      if (dtype == DType::f64) {
        raw.put_u64(b);
      } else {
        raw.put_u32(static_cast<std::uint32_t>(b));
      }
    }
  } else {
    for (double v : values) put_value(raw, v, dtype);
  }
  const auto codec = CodecRegistry::global().get(fp.codec);
  ByteWriter w;
  const int order = values.size() >= static_cast<std::size_t>(fp.delta_order) ? fp.delta_order : 0;
  w.put_u8(static_cast<std::uint8_t>(order));
  w.put_string(codec->name());
  w.put_blob(codec->encode(raw.bytes(), fp.codec_level));
  return w.take();
}

std::vector<double> decode_lossless_stream(ByteSpan stream, DType dtype) {
  ByteReader r(stream);
  const int order = r.get_u8();
  const std::string name = r.get_string();
  if (!CodecRegistry::global().contains(name)) {
    throw FormatError("artifact needs unregistered lossless codec '" + name + "'");
  }
  const Bytes raw = CodecRegistry::global().get(name)->decode(r.get_blob());
  ByteReader vr(raw);
  std::vector<double> out;
  if (order == 0) {
    while (!vr.at_end()) out.push_back(get_value(vr, dtype));
    return out;
  }
  if (order > 2) throw FormatError("bad delta order");
  std::vector<std::uint64_t> bits;
  while (!vr.at_end()) bits.push_back(dtype == DType::f64 ? vr.get_u64() : vr.get_u32());
  for (auto b : inverse_delta_bits(bits, order)) out.push_back(bits_value(b, dtype));
  return out;
}

Bytes trunc_stream(std::span<const double> values, int target) {
  ByteWriter w;
  w.put_u8(static_cast<std::uint8_t>(target));
  for (double v : values) {
    const double t = truncate_value(v, target);
    if (target == 32) {
      w.put(static_cast<float>(t));
    } else {
      w.put_u16(double_to_half(t));
    }
  }
  return w.take();
}

std::vector<double> decode_trunc_stream(ByteSpan stream, DType dtype) {
  ByteReader r(stream);
  const int target = r.get_u8();
  std::vector<double> out;
  if (target == 32) {
    while (!r.at_end()) out.push_back(round_to(dtype, static_cast<double>(r.get<float>())));
  } else if (target == 16) {
    while (!r.at_end()) out.push_back(half_to_double(r.get_u16()));
  } else {
    throw FormatError("bad truncation width");
  }
  return out;
}

Bytes encode_eblc_pred(std::span<const double> values, const ReducerConfig& cfg, DType dtype) {
  pred::Params p{cfg.fixed.quant_bin_cap, cfg.fixed.codec_level, cfg.fixed.pw_rel_zero_floor};
  if (cfg.mode == Mode::pw_rel) return pred::encode_pw_rel(values, cfg.primary(), dtype, p);
  const ColumnStats stats = compute_stats(values, dtype);
  const auto eb = resolve_bound(cfg.mode, cfg.primary(), &stats);
  if (!eb) return pred::encode_verbatim(values, dtype, p);
  return pred::encode_abs(values, *eb, dtype, p);
}

bitplane::Mode bitplane_mode(Mode m) {
  switch (m) {
    case Mode::prec: return bitplane::Mode::prec;
    case Mode::rate: return bitplane::Mode::rate;
    case Mode::acc: return bitplane::Mode::acc;
    default: throw ConfigError("invalid bit-plane mode");
  }
}

Bytes encode_stream(std::span<const double> values, const ReducerConfig& cfg, DType dtype) {
  switch (cfg.method) {
    case Method::none:
      return raw_stream(values, dtype);
    case Method::lossless:
      return lossless_stream(values, dtype, cfg.fixed);
    case Method::eblc_pred:
      return encode_eblc_pred(values, cfg, dtype);
    case Method::eblc_bitplane:
      return bitplane::encode(values, bitplane_mode(cfg.mode), cfg.primary(), dtype);
    case Method::trunc:
      return trunc_stream(values, static_cast<int>(cfg.primary()));
    default:
      throw ConfigError("sampling is not a stream codec");
  }
}

std::vector<double> decode_stream(ByteSpan stream, Method method, DType dtype) {
  switch (method) {
    case Method::none:
    case Method::sample_naive:
    case Method::sample_wr:
    case Method::sample_wor: {
      ByteReader r(stream);
      std::vector<double> out;
      while (!r.at_end()) out.push_back(get_value(r, dtype));
      return out;
    }
    case Method::lossless:
      return decode_lossless_stream(stream, dtype);
    case Method::eblc_pred:
      return pred::decode(stream, dtype);
    case Method::eblc_bitplane:
      return bitplane::decode(stream, dtype);
    case Method::trunc:
      return decode_trunc_stream(stream, dtype);
  }
  throw FormatError("unknown method");
}

SampleScheme scheme_of(Method m) {
  switch (m) {
    case Method::sample_naive: return SampleScheme::naive;
    case Method::sample_wr: return SampleScheme::wr;
    default: return SampleScheme::wor;
  }
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double bandwidth_of(std::uint64_t bytes, double seconds) {
  return static_cast<double>(bytes) / std::max(seconds, 1e-9);
}

}  // namespace

CompressResult compress(const Dataset& d, const ReducerConfig& config) {
  config.validate();
  if (config.method == Method::trunc && config.primary() == 32 && d.dtype() != DType::f64) {
    throw ConfigError("64->32 truncation requires an f64 dataset");
  }
  const auto t0 = Clock::now();
  CompressedArtifact a;
  a.method = config.method;
  a.mode = config.mode;
  a.bound = config.bound;
  a.layout = is_sampling(config.method) ? Layout::by_column : config.layout;
  a.dtype = d.dtype();
  a.n_obs = d.n_obs();
  a.n_feat = static_cast<std::uint32_t>(d.n_feat());
  a.names = d.names();

  std::size_t rows = d.n_obs();
  if (is_sampling(config.method)) {
    const auto kept = sample_rows(d.n_obs(), scheme_of(config.method), config.primary(),
                                  config.fixed.seed);
    rows = kept.size();
    for (std::size_t j = 0; j < d.n_feat(); ++j) {
      auto col = d.column(j);
      ByteWriter w;
      for (auto r : kept) put_value(w, col[r], d.dtype());
      a.streams.push_back(w.take());
    }
  } else if (a.layout == Layout::matrix) {
    const auto flat = d.row_major();
    a.streams.push_back(encode_stream(flat, config, d.dtype()));
  } else {
    for (std::size_t j = 0; j < d.n_feat(); ++j) {
      a.streams.push_back(encode_stream(d.column(j), config, d.dtype()));
    }
  }
  CompressResult res{std::move(a), 0, 0, rows};
  res.seconds = seconds_since(t0);
  res.bandwidth = bandwidth_of(res.artifact.orig_bytes(), res.seconds);
  return res;
}

DecompressResult decompress(const CompressedArtifact& a) {
  const auto t0 = Clock::now();
  std::vector<std::vector<double>> cols(a.n_feat);
  if (a.layout == Layout::matrix) {
    if (a.streams.size() != 1) throw FormatError("matrix layout needs exactly one stream");
    const auto flat = decode_stream(a.streams[0], a.method, a.dtype);
    if (flat.size() != a.n_obs * a.n_feat) throw FormatError("matrix stream size mismatch");
    for (std::size_t j = 0; j < a.n_feat; ++j) {
      cols[j].resize(a.n_obs);
      for (std::size_t i = 0; i < a.n_obs; ++i) cols[j][i] = flat[i * a.n_feat + j];
    }
  } else {
    if (a.streams.size() != a.n_feat) throw FormatError("stream count mismatch");
    for (std::size_t j = 0; j < a.n_feat; ++j) {
      cols[j] = decode_stream(a.streams[j], a.method, a.dtype);
      const std::size_t expect = is_sampling(a.method) ? cols[0].size() : a.n_obs;
      if (cols[j].size() != expect) throw FormatError("column stream length mismatch");
    }
  }
  DecompressResult res{Dataset(std::move(cols), a.names, a.dtype, true), 0, 0};
  res.seconds = seconds_since(t0);
  res.bandwidth = bandwidth_of(a.orig_bytes(), res.seconds);
  return res;
}

DecompressResult decompress(ByteSpan artifact_bytes) {
  return decompress(parse_artifact(artifact_bytes));
}

double reported_ratio(const CompressResult& r, const ReducerConfig& config) {
  if (is_sampling(config.method)) {
    return static_cast<double>(r.artifact.n_obs) / static_cast<double>(r.output_rows);
  }
  return r.artifact.ratio();
}

ErrorReport error_report(const Dataset& original, const Dataset& reconstructed) {
  if (original.n_obs() != reconstructed.n_obs() || original.n_feat() != reconstructed.n_feat()) {
    throw DataError("error report needs equal shapes");
  }
  ErrorReport rep;
  double gmin = std::numeric_limits<double>::infinity();
  double gmax = -gmin;
  double sq = 0;
  for (std::size_t j = 0; j < original.n_feat(); ++j) {
    auto a = original.column(j);
    auto b = reconstructed.column(j);
    const ColumnStats st = compute_stats(a, original.dtype());
    gmin = std::min(gmin, st.min);
    gmax = std::max(gmax, st.max);
    double cmax = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double e = std::fabs(a[i] - b[i]);
      cmax = std::max(cmax, e);
      sq += e * e;
    }
    const double rel = st.zero_range ? (cmax == 0 ? 0.0 : std::numeric_limits<double>::infinity())
                                     : cmax / st.range;
    rep.column_max_abs_err.push_back(cmax);
    rep.column_max_rel_to_range_err.push_back(rel);
    rep.max_abs_err = std::max(rep.max_abs_err, cmax);
    rep.max_rel_to_range_err = std::max(rep.max_rel_to_range_err, rel);
  }
  rep.mse = sq / static_cast<double>(original.n_obs() * original.n_feat());
  rep.value_range = gmax - gmin;
  rep.psnr_db = rep.mse > 0 && rep.value_range > 0
                    ? 10.0 * std::log10(rep.value_range * rep.value_range / rep.mse)
                    : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace ppress
