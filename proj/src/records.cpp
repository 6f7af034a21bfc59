#include "ppress/records.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "ppress/error.hpp"
#include "ppress/hash.hpp"

namespace ppress {

namespace fs = std::filesystem;

std::string_view to_string(CompressTarget t) {
  switch (t) {
    case CompressTarget::train: return "train";
    case CompressTarget::validation: return "validation";
    case CompressTarget::both: return "both";
  }
  return "?";
}

CompressTarget parse_compress_target(std::string_view s) {
  if (s == "train") return CompressTarget::train;
  if (s == "validation") return CompressTarget::validation;
  if (s == "both") return CompressTarget::both;
  throw ConfigError("unknown compress_target: " + std::string(s));
}

Json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw DataError("expected a number, got " + j.dump());
}

Json to_json(const FixedParams& f) {
  return Json{{"quant_bin_cap", f.quant_bin_cap}, {"block_size", f.block_size},
              {"pw_rel_zero_floor", f.pw_rel_zero_floor}, {"codec_level", f.codec_level},
              {"seed", f.seed}, {"codec", f.codec}, {"delta_order", f.delta_order}};
}

FixedParams fixed_from_json(const Json& j) {
  FixedParams f;
  if (!j.is_object()) return f;
  f.quant_bin_cap = j.value("quant_bin_cap", f.quant_bin_cap);
  f.block_size = j.value("block_size", f.block_size);
  f.pw_rel_zero_floor = j.value("pw_rel_zero_floor", f.pw_rel_zero_floor);
  f.codec_level = j.value("codec_level", f.codec_level);
  f.seed = j.value("seed", f.seed);
  f.codec = j.value("codec", f.codec);
  f.delta_order = j.value("delta_order", f.delta_order);
  return f;
}

Json to_json(const ReducerConfig& c) {
  Json bounds = Json::array();
  for (double b : c.bound) bounds.push_back(number_to_json(b));
  return Json{{"method", to_string(c.method)}, {"mode", to_string(c.mode)}, {"bound", bounds},
              {"layout", to_string(c.layout)}, {"fixed", to_json(c.fixed)}};
}

ReducerConfig config_from_json(const Json& j) {
  ReducerConfig c;
  c.method = parse_method(j.at("method").get<std::string>());
  c.mode = parse_mode(j.value("mode", std::string("NONE")));
  if (j.contains("bound")) {
    const Json& b = j.at("bound");
    if (b.is_array()) {
      for (const auto& x : b) c.bound.push_back(number_from_json(x));
    } else {
      c.bound.push_back(number_from_json(b));
    }
  }
  c.layout = parse_layout(j.value("layout", std::string("by_column")));
  if (j.contains("fixed")) c.fixed = fixed_from_json(j.at("fixed"));
  return c;
}

Json to_json(const Application& a) {
  Json j{{"id", a.id},
         {"kind", to_string(a.kind)},
         {"target", a.target},
         {"metric", to_string(a.metric.name)},
         {"threshold", a.metric.threshold},
         {"r2_determination", a.metric.r2_determination},
         {"seed", a.seed}};
  switch (a.kind) {
    case AppKind::ridge_regression: j["lambda_scale"] = a.ridge_lambda_scale; break;
    case AppKind::knn_classifier: j["k"] = a.knn_k; break;
    case AppKind::lowrank_reconstruction: j["rank"] = a.rank; break;
    case AppKind::external:
      j["command"] = a.external.command;
      j["timeout_seconds"] = a.external.timeout_seconds;
      break;
  }
  return j;
}

Application application_from_json(const Json& j) {
  Application a;
  a.id = j.at("id").get<std::string>();
  a.kind = parse_app_kind(j.at("kind").get<std::string>());
  a.target = j.value("target", std::string());
  if (j.contains("metric")) {
    a.metric.name = parse_metric(j.at("metric").get<std::string>());
  } else {
    switch (a.kind) {
      case AppKind::ridge_regression: a.metric.name = MetricName::r2; break;
      case AppKind::knn_classifier: a.metric.name = MetricName::accuracy; break;
      case AppKind::lowrank_reconstruction: a.metric.name = MetricName::mse; break;
      case AppKind::external: throw ConfigError("external application '" + a.id + "' needs a metric");
    }
  }
  a.metric.threshold = j.value("threshold", a.metric.threshold);
  a.metric.r2_determination = j.value("r2_determination", false);
  a.seed = j.value("seed", a.seed);
  a.ridge_lambda_scale = j.value("lambda_scale", a.ridge_lambda_scale);
  a.knn_k = j.value("k", a.knn_k);
  a.rank = j.value("rank", a.rank);
  a.external.command = j.value("command", std::string());
  a.external.timeout_seconds = j.value("timeout_seconds", a.external.timeout_seconds);
  a.validate();
  return a;
}

Json to_json(const EvaluationRecord& r) {
  return Json{
      {"schema", kRecordSchemaVersion},
      {"record_id", r.record_id},
      {"dataset_id", r.dataset_id},
      {"app_id", r.app_id},
      {"label", r.label},
      {"role", r.role},
      {"config", to_json(r.config)},
      {"compress_target", to_string(r.target)},
      {"seed", r.seed},
      {"ok", r.ok},
      {"error", r.error},
      {"metric", r.metric},
      {"direction", to_string(r.direction)},
      {"psi", number_to_json(r.psi)},
      {"degenerate", r.degenerate},
      {"ratio", number_to_json(r.ratio)},
      {"decompress_bandwidth", number_to_json(r.decompress_bandwidth)},
      {"compress_bandwidth", number_to_json(r.compress_bandwidth)},
      {"orig_bytes", r.orig_bytes},
      {"comp_bytes", r.comp_bytes},
      {"errors",
       {{"max_abs_err", number_to_json(r.errors.max_abs_err)},
        {"max_rel_to_range_err", number_to_json(r.errors.max_rel_to_range_err)},
        {"mse", number_to_json(r.errors.mse)},
        {"psnr_db", number_to_json(r.errors.psnr_db)}}},
      {"timing",
       {{"compress_seconds", r.compress_seconds},
        {"decompress_seconds", r.decompress_seconds},
        {"app_seconds", r.app_seconds}}},
      {"timestamp", r.timestamp},
      {"cached", r.cached},
  };
}

EvaluationRecord record_from_json(const Json& j) {
  if (j.value("schema", 0) != kRecordSchemaVersion) {
    throw DataError("unsupported record schema version");
  }
  EvaluationRecord r;
  r.record_id = j.at("record_id").get<std::string>();
  r.dataset_id = j.at("dataset_id").get<std::string>();
  r.app_id = j.at("app_id").get<std::string>();
  r.label = j.at("label").get<std::string>();
  r.role = j.at("role").get<std::string>();
  r.config = config_from_json(j.at("config"));
  r.target = parse_compress_target(j.at("compress_target").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.metric = j.at("metric").get<std::string>();
  r.direction = j.at("direction").get<std::string>() == "lower_better" ? Direction::lower_better
                                                                        : Direction::higher_better;
  r.psi = number_from_json(j.at("psi"));
  r.degenerate = j.at("degenerate").get<bool>();
  r.ratio = number_from_json(j.at("ratio"));
  r.decompress_bandwidth = number_from_json(j.at("decompress_bandwidth"));
  r.compress_bandwidth = number_from_json(j.at("compress_bandwidth"));
  r.orig_bytes = j.at("orig_bytes").get<std::uint64_t>();
  r.comp_bytes = j.at("comp_bytes").get<std::uint64_t>();
  const Json& e = j.at("errors");
  r.errors.max_abs_err = number_from_json(e.at("max_abs_err"));
  r.errors.max_rel_to_range_err = number_from_json(e.at("max_rel_to_range_err"));
  r.errors.mse = number_from_json(e.at("mse"));
  r.errors.psnr_db = number_from_json(e.at("psnr_db"));
  const Json& t = j.at("timing");
  r.compress_seconds = t.at("compress_seconds").get<double>();
  r.decompress_seconds = t.at("decompress_seconds").get<double>();
  r.app_seconds = t.at("app_seconds").get<double>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.cached = j.at("cached").get<bool>();
  return r;
}

std::string to_json_line(const EvaluationRecord& r) { return to_json(r).dump(); }

Json deterministic_view(const EvaluationRecord& r) {
  Json j = to_json(r);
  j.erase("timing");
  j.erase("timestamp");
  j.erase("cached");
  j.erase("decompress_bandwidth");
  j.erase("compress_bandwidth");
  return j;
}

bool same_content(const EvaluationRecord& a, const EvaluationRecord& b) {
  return deterministic_view(a) == deterministic_view(b);
}

std::string cache_key(const std::string& dataset_id, const Application& app,
                      const ReducerConfig& config, CompressTarget target, std::uint64_t seed) {
  const Json j{{"dataset", dataset_id},
               {"app", to_json(app)},
               {"config", to_json(config)},
               {"target", to_string(target)},
               {"seed", seed},
               {"schema", kRecordSchemaVersion}};
  return sha256_hex(j.dump());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RecordStore::RecordStore(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
}

void RecordStore::append(const EvaluationRecord& r) { append(std::vector<EvaluationRecord>{r}); }

void RecordStore::append(const std::vector<EvaluationRecord>& rs) {
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot open record store " + path_.string());
  for (const auto& r : rs) out << to_json_line(r) << '\n';
  out.flush();
  if (!out) throw Error("write to record store " + path_.string() + " failed");
}

std::vector<EvaluationRecord> RecordStore::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open record store " + path.string());
  std::vector<EvaluationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

RecordCache::RecordCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path RecordCache::file_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<EvaluationRecord> RecordCache::get(const std::string& key) const {
  const fs::path p = file_for(key);
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    EvaluationRecord r = record_from_json(Json::parse(ss.str()));
    if (r.record_id != key) return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;  // corrupt entry: recompute
  }
}

void RecordCache::put(const EvaluationRecord& r) const {
  const fs::path p = file_for(r.record_id);
  fs::create_directories(p.parent_path());
  // Unique temp name, then rename, so concurrent writers never expose partial files.
  thread_local std::mt19937_64 gen{std::random_device{}()};
  const fs::path tmp = p.string() + ".tmp" + std::to_string(gen());
  {
    std::ofstream out(tmp, std::ios::binary);
    out << to_json(r).dump(1) << '\n';
    if (!out) throw Error("cannot write cache entry " + tmp.string());
  }
  fs::rename(tmp, p);
}

}  // namespace ppress
