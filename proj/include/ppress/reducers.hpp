#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppress/bytes.hpp"
#include "ppress/lossless.hpp"
#include "ppress/tabular.hpp"

namespace ppress {

enum class Method : std::uint8_t {
  none = 0,
  lossless = 1,
  eblc_pred = 2,
  eblc_bitplane = 3,
  trunc = 4,
  sample_naive = 5,
  sample_wr = 6,
  sample_wor = 7,
};

enum class Mode : std::uint8_t {
  none = 0,
  abs = 1,
  rel = 2,
  pw_rel = 3,
  psnr = 4,
  prec = 5,
  acc = 6,
  rate = 7,
};

enum class Layout : std::uint8_t { by_column = 0, matrix = 1 };

std::string_view to_string(Method m);
std::string_view to_string(Mode m);
std::string_view to_string(Layout l);
Method parse_method(std::string_view s);
Mode parse_mode(std::string_view s);
Layout parse_layout(std::string_view s);

bool is_sampling(Method m);

// Fixed compressor parameters (held constant during a search).
struct FixedParams {
  std::uint32_t quant_bin_cap = 65536;
  std::uint32_t block_size = 4;
  double pw_rel_zero_floor = 0.0;  // 0 = smallest positive normal of the dtype
  int codec_level = 1;
  std::uint64_t seed = 0;
  std::string codec = std::string(kDefaultCodec);  // LOSSLESS backend
  int delta_order = 0;                             // LOSSLESS preprocessing: 0, 1 or 2

  bool operator==(const FixedParams&) const = default;
};

// A reduction method, its mode, the nonfixed bound vector and fixed params.
// bound[0] carries the tuned quantity: error bound (ABS/REL/PW_REL/ACC),
// target PSNR in dB (PSNR), bit planes (PREC), bits per value (RATE), stride
// (SAMPLE_NAIVE), fraction (SAMPLE_WR/WOR) or target width (TRUNC).
struct ReducerConfig {
  Method method = Method::none;
  Mode mode = Mode::none;
  std::vector<double> bound;
  Layout layout = Layout::by_column;
  FixedParams fixed;

  // Throws ConfigError when the method/mode pair or the bounds are invalid.
  void validate() const;
  double primary() const { return bound.empty() ? 0.0 : bound.front(); }
  // e.g. "EBLC_PRED/REL" or "NONE"
  std::string label() const;
  ReducerConfig with_bound(double b) const;

  bool operator==(const ReducerConfig&) const = default;
};

// Sentinel for PW_REL, which has no single absolute bound.
inline constexpr double kPerValueBound = -1.0;

// Absolute bound (data units) implied by `mode` and `value` for a stream
// with the given stats. Returns nullopt for REL/PSNR on a zero-range
// stream, which is then stored losslessly, and kPerValueBound for PW_REL.
std::optional<double> resolve_bound(Mode mode, double value, const ColumnStats* stats);

struct StreamEntry {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::uint32_t crc = 0;
};

inline constexpr std::uint16_t kFormatVersion = 1;

// Self-describing container. See docs/container_format.md for the byte layout.
struct CompressedArtifact {
  Method method = Method::none;
  Mode mode = Mode::none;
  std::vector<double> bound;
  Layout layout = Layout::by_column;
  DType dtype = DType::f64;
  std::uint64_t n_obs = 0;  // rows of the original dataset
  std::uint32_t n_feat = 0;
  std::vector<Bytes> streams;
  std::vector<std::string> names;

  std::uint64_t orig_bytes() const { return n_obs * n_feat * width(dtype); }
  std::uint64_t header_bytes() const;
  std::uint64_t comp_bytes() const;
  // orig_bytes / comp_bytes.
  double ratio() const;
};

Bytes serialize(const CompressedArtifact& a);
// Verifies magic, version and every checksum; throws FormatError.
CompressedArtifact parse_artifact(ByteSpan bytes);

struct CompressResult {
  CompressedArtifact artifact;
  double seconds = 0;
  double bandwidth = 0;  // original bytes per second
  std::size_t output_rows = 0;
};

struct DecompressResult {
  Dataset dataset;
  double seconds = 0;
  double bandwidth = 0;  // original bytes per second
};

CompressResult compress(const Dataset& d, const ReducerConfig& config);
DecompressResult decompress(const CompressedArtifact& a);
DecompressResult decompress(ByteSpan artifact_bytes);

// Compression ratio as reported in evaluation records: byte ratio for
// codecs, original rows / retained rows for sampling.
double reported_ratio(const CompressResult& r, const ReducerConfig& config);

struct ErrorReport {
  double max_abs_err = 0;
  double max_rel_to_range_err = 0;
  std::vector<double> column_max_abs_err;
  std::vector<double> column_max_rel_to_range_err;
  double mse = 0;
  double psnr_db = 0;  // +inf when mse == 0
  double value_range = 0;
};

// Requires equal shapes.
ErrorReport error_report(const Dataset& original, const Dataset& reconstructed);

}  // namespace ppress
