#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ppress/quality.hpp"
#include "ppress/reducers.hpp"

namespace ppress {

using Json = nlohmann::json;

enum class CompressTarget : std::uint8_t { train, validation, both };
std::string_view to_string(CompressTarget t);
CompressTarget parse_compress_target(std::string_view s);

struct ErrorSummary {
  double max_abs_err = 0;
  double max_rel_to_range_err = 0;
  double mse = 0;
  double psnr_db = 0;

  bool operator==(const ErrorSummary&) const = default;
};

inline constexpr int kRecordSchemaVersion = 1;

// One evaluation of (dataset, application, reducer configuration). The
// serialized form is a single JSON object; see docs/record_schema.json.
struct EvaluationRecord {
  std::string record_id;  // equals the cache key
  std::string dataset_id;
  std::string app_id;
  std::string label;  // method/mode label of the config
  std::string role;   // baseline | probe_upper | probe_lower | prescan | candidate | control
  ReducerConfig config;
  CompressTarget target = CompressTarget::both;
  std::uint64_t seed = 0;

  bool ok = true;
  std::string error;

  std::string metric;
  Direction direction = Direction::higher_better;
  double psi = 0;
  bool degenerate = false;
  double ratio = 0;                  // C
  double decompress_bandwidth = 0;   // b_c, bytes/s
  double compress_bandwidth = 0;     // b_c', bytes/s
  std::uint64_t orig_bytes = 0;
  std::uint64_t comp_bytes = 0;
  ErrorSummary errors;

  // Timing and provenance; excluded from determinism comparisons.
  double compress_seconds = 0;
  double decompress_seconds = 0;
  double app_seconds = 0;
  std::string timestamp;
  bool cached = false;
};

Json to_json(const FixedParams& f);
FixedParams fixed_from_json(const Json& j);
Json to_json(const ReducerConfig& c);
ReducerConfig config_from_json(const Json& j);
Json to_json(const Application& a);
Application application_from_json(const Json& j);
Json to_json(const EvaluationRecord& r);
EvaluationRecord record_from_json(const Json& j);

// Non-finite doubles are written as the strings "inf", "-inf", "nan".
Json number_to_json(double v);
double number_from_json(const Json& j);

// Compact one-line form with sorted keys.
std::string to_json_line(const EvaluationRecord& r);
// JSON of every field that must match between a cache hit and a recompute.
Json deterministic_view(const EvaluationRecord& r);
bool same_content(const EvaluationRecord& a, const EvaluationRecord& b);

std::string cache_key(const std::string& dataset_id, const Application& app,
                      const ReducerConfig& config, CompressTarget target, std::uint64_t seed);

std::string utc_timestamp();

// Append-only JSON-lines store. Appends are serialized through a mutex and
// flushed per line; existing lines are never rewritten.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path path);
  void append(const EvaluationRecord& r);
  void append(const std::vector<EvaluationRecord>& rs);
  const std::filesystem::path& path() const { return path_; }

  // Throws DataError on a malformed line (with the line number).
  static std::vector<EvaluationRecord> load(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

// Content-addressed cache: <dir>/<key[0:2]>/<key>.json.
class RecordCache {
 public:
  explicit RecordCache(std::filesystem::path dir);
  std::optional<EvaluationRecord> get(const std::string& key) const;
  void put(const EvaluationRecord& r) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path file_for(const std::string& key) const;
  std::filesystem::path dir_;
};

}  // namespace ppress
