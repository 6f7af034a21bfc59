#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppress {

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

constexpr std::size_t width(DType t) { return t == DType::f32 ? 4 : 8; }
std::string_view to_string(DType t);
DType parse_dtype(std::string_view s);

// Rounds to the nearest value representable in `t` (identity for f64).
inline double round_to(DType t, double v) {
  return t == DType::f32 ? static_cast<double>(static_cast<float>(v)) : v;
}

enum class Order : std::uint8_t { row_major = 0, col_major = 1 };
std::string_view to_string(Order o);
Order parse_order(std::string_view s);

// Immutable column-oriented table of floating point values.
//
// Values are held as doubles; for f32 datasets every value is exactly
// representable as a float. The content id is a SHA-256 over dtype, shape
// and the little-endian element bytes in the dataset's own width.
class Dataset {
 public:
  Dataset(std::vector<std::vector<double>> columns, std::vector<std::string> names,
          DType dtype = DType::f64, bool allow_nonfinite = false);
  // Default names c0..c{n-1}.
  Dataset(std::vector<std::vector<double>> columns, DType dtype = DType::f64,
          bool allow_nonfinite = false);

  std::size_t n_obs() const { return columns_.front().size(); }
  std::size_t n_feat() const { return columns_.size(); }
  DType dtype() const { return dtype_; }
  const std::string& id() const { return id_; }
  const std::vector<std::string>& names() const { return names_; }

  std::span<const double> column(std::size_t j) const { return columns_.at(j); }
  const std::vector<std::vector<double>>& columns() const { return columns_; }
  double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::size_t bytes() const { return n_obs() * n_feat() * width(dtype_); }
  std::optional<std::size_t> column_index(std::string_view name) const;

  // All values in row-major order.
  std::vector<double> row_major() const;
  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset with_dtype(DType t) const;

 private:
  std::vector<std::vector<double>> columns_;
  std::vector<std::string> names_;
  DType dtype_;
  std::string id_;
};

// Builds a dataset from a row-major buffer.
Dataset from_row_major(std::span<const double> values, std::size_t n_obs, std::size_t n_feat,
                       DType dtype = DType::f64, bool allow_nonfinite = false);

bool bit_identical(const Dataset& a, const Dataset& b);

struct CsvOptions {
  bool header = true;
  bool allow_nonfinite = false;
  DType dtype = DType::f64;
};

Dataset parse_csv(std::string_view text, const CsvOptions& options = {});
Dataset load_csv(const std::string& path, const CsvOptions& options = {});
void save_csv(const Dataset& d, const std::string& path);

// Out-of-band description of a raw binary file. The sidecar file is text with
// one "key value" pair per line: dtype, n_obs, n_feat, order.
struct RawDescriptor {
  DType dtype = DType::f64;
  std::size_t n_obs = 0;
  std::size_t n_feat = 0;
  Order order = Order::row_major;
};

std::string descriptor_path(const std::string& raw_path);  // "<raw>.desc"
RawDescriptor read_descriptor(const std::string& path);
void write_descriptor(const RawDescriptor& desc, const std::string& path);

Dataset load_raw(const std::string& path, std::size_t n_obs, std::size_t n_feat, DType dtype,
                 Order order = Order::row_major, bool allow_nonfinite = false);
Dataset load_raw(const std::string& path, const RawDescriptor& desc, bool allow_nonfinite = false);
// Writes the raw file (and the sidecar descriptor when write_sidecar is set).
void save_raw(const Dataset& d, const std::string& path, Order order = Order::row_major,
              bool write_sidecar = true);
Dataset decode_raw(std::span<const std::uint8_t> bytes, const RawDescriptor& desc,
                   bool allow_nonfinite = false);
std::vector<std::uint8_t> encode_raw(const Dataset& d, Order order = Order::row_major);

struct ColumnStats {
  double min = 0;
  double max = 0;
  double range = 0;
  double mean = 0;
  double variance = 0;  // population variance
  bool zero_range = true;
};

ColumnStats compute_stats(std::span<const double> values, DType dtype = DType::f64);
std::vector<ColumnStats> column_stats(const Dataset& d);

enum class HistScale : std::uint8_t { linear, log10 };
HistScale parse_hist_scale(std::string_view s);

struct RangeHistogram {
  HistScale scale = HistScale::linear;
  std::vector<double> edges;  // n_bins + 1 edges over nonzero ranges (log10 units for log10)
  std::vector<std::size_t> counts;
  std::size_t zero_count = 0;  // columns whose range is exactly 0

  std::size_t total() const;
};

RangeHistogram range_histogram(std::span<const ColumnStats> stats, std::size_t n_bins,
                               HistScale scale = HistScale::linear);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool shuffled = true;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

SplitIndices split_indices(std::size_t n_obs, const SplitSpec& spec);

struct DatasetPair {
  Dataset train;
  Dataset validation;
};

DatasetPair split(const Dataset& d, const SplitSpec& spec);

}  // namespace ppress
