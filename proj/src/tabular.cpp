#include "ppress/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ppress/bytes.hpp"
#include "ppress/error.hpp"
#include "ppress/hash.hpp"
#include "ppress/rng.hpp"

namespace ppress {

std::string_view to_string(DType t) { return t == DType::f32 ? "f32" : "f64"; }

DType parse_dtype(std::string_view s) {
  if (s == "f32" || s == "float32" || s == "float") return DType::f32;
  if (s == "f64" || s == "float64" || s == "double") return DType::f64;
  throw ConfigError("unknown dtype: " + std::string(s));
}

std::string_view to_string(Order o) { return o == Order::row_major ? "row_major" : "col_major"; }

Order parse_order(std::string_view s) {
  if (s == "row_major" || s == "C") return Order::row_major;
  if (s == "col_major" || s == "F") return Order::col_major;
  throw ConfigError("unknown order: " + std::string(s));
}

namespace {

std::string compute_id(const std::vector<std::vector<double>>& cols, DType dtype) {
  Sha256 h;
  ByteWriter head;
  head.put_u8(static_cast<std::uint8_t>(dtype));
  head.put_u64(cols.front().size());
  head.put_u64(cols.size());
  h.update(head.bytes());
  std::vector<std::uint8_t> buf;
  for (const auto& c : cols) {
    buf.resize(c.size() * width(dtype));
    if (dtype == DType::f64) {
      std::memcpy(buf.data(), c.data(), buf.size());
    } else {
      for (std::size_t i = 0; i < c.size(); ++i) {
        const float f = static_cast<float>(c[i]);
        std::memcpy(buf.data() + 4 * i, &f, 4);
      }
    }
    h.update(buf);
  }
  return h.hex_digest();
}

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t j = 0; j < n; ++j) names.push_back("c" + std::to_string(j));
  return names;
}

}  // namespace

Dataset::Dataset(std::vector<std::vector<double>> columns, std::vector<std::string> names,
                 DType dtype, bool allow_nonfinite)
    : columns_(std::move(columns)), names_(std::move(names)), dtype_(dtype) {
  if (columns_.empty()) throw DataError("dataset needs at least one column");
  const std::size_t n = columns_.front().size();
  if (n == 0) throw DataError("dataset needs at least one row");
  if (names_.empty()) names_ = default_names(columns_.size());
  if (names_.size() != columns_.size()) throw DataError("column name count mismatch");
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    auto& c = columns_[j];
    if (c.size() != n) throw DataError("column " + std::to_string(j) + " has a different length");
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = round_to(dtype_, c[i]);
      if (!allow_nonfinite && !std::isfinite(c[i])) {
        throw DataError("non-finite value at row " + std::to_string(i) + ", column " +
                        std::to_string(j));
      }
    }
  }
  id_ = compute_id(columns_, dtype_);
}

Dataset::Dataset(std::vector<std::vector<double>> columns, DType dtype, bool allow_nonfinite)
    : Dataset(std::move(columns), {}, dtype, allow_nonfinite) {}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return j;
  }
  return std::nullopt;
}

std::vector<double> Dataset::row_major() const {
  const std::size_t n = n_obs(), f = n_feat();
  std::vector<double> out(n * f);
  for (std::size_t j = 0; j < f; ++j) {
    for (std::size_t i = 0; i < n; ++i) out[i * f + j] = columns_[j][i];
  }
  return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> cols(n_feat());
  for (std::size_t j = 0; j < n_feat(); ++j) {
    cols[j].reserve(rows.size());
    for (auto r : rows) cols[j].push_back(columns_[j].at(r));
  }
  return Dataset(std::move(cols), names_, dtype_, true);
}

Dataset Dataset::with_dtype(DType t) const { return Dataset(columns_, names_, t, true); }

Dataset from_row_major(std::span<const double> values, std::size_t n_obs, std::size_t n_feat,
                       DType dtype, bool allow_nonfinite) {
  if (values.size() != n_obs * n_feat) throw DataError("row-major buffer size mismatch");
  std::vector<std::vector<double>> cols(n_feat, std::vector<double>(n_obs));
  for (std::size_t i = 0; i < n_obs; ++i) {
    for (std::size_t j = 0; j < n_feat; ++j) cols[j][i] = values[i * n_feat + j];
  }
  return Dataset(std::move(cols), dtype, allow_nonfinite);
}

bool bit_identical(const Dataset& a, const Dataset& b) {
  if (a.dtype() != b.dtype() || a.n_obs() != b.n_obs() || a.n_feat() != b.n_feat()) return false;
  for (std::size_t j = 0; j < a.n_feat(); ++j) {
    auto ca = a.column(j), cb = b.column(j);
    if (std::memcmp(ca.data(), cb.data(), ca.size() * sizeof(double)) != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one record into fields, honoring double-quoted fields.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
bool parse_number(std::string_view cell, T& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc::result_out_of_range) {
    // from_chars reports overflow/underflow without a value; fall back to strtod semantics.
    std::string tmp(cell);
    out = static_cast<T>(std::strtod(tmp.c_str(), nullptr));
    return true;
  }
  return ec == std::errc() && ptr == last;
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvOptions& options) {
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  std::size_t line_no = 0;
  std::size_t row = 0;
  bool first_record = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split_record(line);
    if (first_record && options.header) {
      for (auto& f : fields) names.emplace_back(trim(f));
      cols.resize(fields.size());
      first_record = false;
      continue;
    }
    if (first_record) {
      cols.resize(fields.size());
      first_record = false;
    }
    if (fields.size() != cols.size()) {
      throw DataError("ragged row at line " + std::to_string(line_no) + ": expected " +
                      std::to_string(cols.size()) + " cells, found " +
                      std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = 0;
      bool ok;
      if (options.dtype == DType::f32) {
        float f = 0;
        ok = parse_number(fields[j], f);
        v = f;
      } else {
        ok = parse_number(fields[j], v);
      }
      if (!ok) {
        throw DataError("cannot parse cell at line " + std::to_string(line_no) + ", column " +
                        std::to_string(j + 1) + ": '" + std::string(trim(fields[j])) + "'");
      }
      if (!options.allow_nonfinite && !std::isfinite(v)) {
        throw DataError("non-finite cell at line " + std::to_string(line_no) + ", column " +
                        std::to_string(j + 1));
      }
      cols[j].push_back(v);
    }
    ++row;
    if (end == text.size()) break;
  }
  if (cols.empty() || row == 0) throw DataError("CSV contains no data rows");
  return Dataset(std::move(cols), std::move(names), options.dtype, options.allow_nonfinite);
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  const Bytes raw = read_file(path);
  return parse_csv(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()),
                   options);
}

void save_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (std::size_t j = 0; j < d.n_feat(); ++j) out << (j ? "," : "") << d.names()[j];
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < d.n_obs(); ++i) {
    for (std::size_t j = 0; j < d.n_feat(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d.at(i, j));
      (void)ec;
      if (j) out << ',';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Raw binary

std::string descriptor_path(const std::string& raw_path) { return raw_path + ".desc"; }

RawDescriptor read_descriptor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open descriptor: " + path);
  RawDescriptor desc;
  bool have_n = false, have_f = false;
  std::string key, value;
  while (in >> key >> value) {
    if (key == "dtype") {
      desc.dtype = parse_dtype(value);
    } else if (key == "n_obs") {
      desc.n_obs = std::stoull(value);
      have_n = true;
    } else if (key == "n_feat") {
      desc.n_feat = std::stoull(value);
      have_f = true;
    } else if (key == "order") {
      desc.order = parse_order(value);
    } else {
      throw DataError("unknown descriptor key '" + key + "' in " + path);
    }
  }
  if (!have_n || !have_f) throw DataError("descriptor lacks n_obs/n_feat: " + path);
  return desc;
}

void write_descriptor(const RawDescriptor& desc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write descriptor: " + path);
  out << "dtype " << to_string(desc.dtype) << "\n"
      << "n_obs " << desc.n_obs << "\n"
      << "n_feat " << desc.n_feat << "\n"
      << "order " << to_string(desc.order) << "\n";
}

Dataset decode_raw(std::span<const std::uint8_t> bytes, const RawDescriptor& desc,
                   bool allow_nonfinite) {
  const std::size_t w = width(desc.dtype);
  const std::size_t expect = desc.n_obs * desc.n_feat * w;
  if (bytes.size() != expect) {
    throw DataError("raw size mismatch: expected " + std::to_string(expect) + " bytes, found " +
                    std::to_string(bytes.size()));
  }
  std::vector<std::vector<double>> cols(desc.n_feat, std::vector<double>(desc.n_obs));
  for (std::size_t i = 0; i < desc.n_obs; ++i) {
    for (std::size_t j = 0; j < desc.n_feat; ++j) {
      const std::size_t k =
          desc.order == Order::row_major ? i * desc.n_feat + j : j * desc.n_obs + i;
      if (desc.dtype == DType::f64) {
        std::memcpy(&cols[j][i], bytes.data() + k * 8, 8);
      } else {
        float f;
        std::memcpy(&f, bytes.data() + k * 4, 4);
        cols[j][i] = f;
      }
    }
  }
  return Dataset(std::move(cols), desc.dtype, allow_nonfinite);
}

std::vector<std::uint8_t> encode_raw(const Dataset& d, Order order) {
  const std::size_t w = width(d.dtype());
  std::vector<std::uint8_t> out(d.bytes());
  for (std::size_t i = 0; i < d.n_obs(); ++i) {
    for (std::size_t j = 0; j < d.n_feat(); ++j) {
      const std::size_t k = order == Order::row_major ? i * d.n_feat() + j : j * d.n_obs() + i;
      const double v = d.at(i, j);
      if (d.dtype() == DType::f64) {
        std::memcpy(out.data() + k * w, &v, 8);
      } else {
        const float f = static_cast<float>(v);
        std::memcpy(out.data() + k * w, &f, 4);
      }
    }
  }
  return out;
}

Dataset load_raw(const std::string& path, std::size_t n_obs, std::size_t n_feat, DType dtype,
                 Order order, bool allow_nonfinite) {
  return decode_raw(read_file(path), RawDescriptor{dtype, n_obs, n_feat, order}, allow_nonfinite);
}

Dataset load_raw(const std::string& path, const RawDescriptor& desc, bool allow_nonfinite) {
  return decode_raw(read_file(path), desc, allow_nonfinite);
}

void save_raw(const Dataset& d, const std::string& path, Order order, bool write_sidecar) {
  write_file(path, encode_raw(d, order));
  if (write_sidecar) {
    write_descriptor(RawDescriptor{d.dtype(), d.n_obs(), d.n_feat(), order}, descriptor_path(path));
  }
}

// ---------------------------------------------------------------------------
// Statistics

ColumnStats compute_stats(std::span<const double> values, DType dtype) {
  ColumnStats s;
  if (values.empty()) return s;
  double lo = values[0], hi = values[0];
  double mean = 0, m2 = 0;
  std::size_t n = 0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  s.min = lo;
  s.max = hi;
  s.range = round_to(dtype, hi - lo);
  s.zero_range = s.range == 0.0;
  s.mean = std::clamp(mean, lo, hi);
  s.variance = std::max(0.0, m2 / static_cast<double>(n));
  return s;
}

std::vector<ColumnStats> column_stats(const Dataset& d) {
  std::vector<ColumnStats> out;
  out.reserve(d.n_feat());
  for (std::size_t j = 0; j < d.n_feat(); ++j) out.push_back(compute_stats(d.column(j), d.dtype()));
  return out;
}

HistScale parse_hist_scale(std::string_view s) {
  if (s == "linear") return HistScale::linear;
  if (s == "log10" || s == "log") return HistScale::log10;
  throw ConfigError("unknown histogram scale: " + std::string(s));
}

std::size_t RangeHistogram::total() const {
  std::size_t t = zero_count;
  for (auto c : counts) t += c;
  return t;
}

RangeHistogram range_histogram(std::span<const ColumnStats> stats, std::size_t n_bins,
                               HistScale scale) {
  if (n_bins == 0) throw ConfigError("histogram needs at least one bin");
  RangeHistogram h;
  h.scale = scale;
  h.counts.assign(n_bins, 0);
  std::vector<double> keys;
  for (const auto& s : stats) {
    if (s.zero_range) {
      ++h.zero_count;
    } else {
      keys.push_back(scale == HistScale::log10 ? std::log10(s.range) : s.range);
    }
  }
  h.edges.assign(n_bins + 1, 0.0);
  if (keys.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(keys.begin(), keys.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi - lo;
  for (std::size_t b = 0; b <= n_bins; ++b) {
    h.edges[b] = span > 0 ? lo + span * static_cast<double>(b) / static_cast<double>(n_bins) : lo;
  }
  for (double k : keys) {
    std::size_t b = 0;
    if (span > 0) {
      b = static_cast<std::size_t>((k - lo) / span * static_cast<double>(n_bins));
      b = std::min(b, n_bins - 1);
    }
    ++h.counts[b];
  }
  return h;
}

// ---------------------------------------------------------------------------
// Splitting

SplitIndices split_indices(std::size_t n_obs, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n_obs)));
  if (n_train == 0 || n_train >= n_obs) {
    throw ConfigError("train_fraction " + std::to_string(spec.train_fraction) + " on " +
                      std::to_string(n_obs) + " rows leaves an empty split");
  }
  std::vector<std::size_t> order(n_obs);
  for (std::size_t i = 0; i < n_obs; ++i) order[i] = i;
  if (spec.shuffled) {
    Rng rng(spec.seed);
    rng.shuffle(std::span<std::size_t>(order));
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  // Random membership, source row order within each part.
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

DatasetPair split(const Dataset& d, const SplitSpec& spec) {
  auto idx = split_indices(d.n_obs(), spec);
  return DatasetPair{d.select_rows(idx.train), d.select_rows(idx.validation)};
}

}  // namespace ppress
