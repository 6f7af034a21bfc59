#include "ppress/campaign_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ppress/error.hpp"

namespace ppress {

namespace fs = std::filesystem;

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

DatasetEntry dataset_from_json(const Json& j, const fs::path& base, std::size_t index) {
  check_keys(j, {"id", "path", "format", "descriptor", "dtype", "header", "split"}, "dataset");
  DatasetEntry e;
  e.id = j.value("id", "dataset" + std::to_string(index));
  e.path = resolve(base, j.at("path").get<std::string>());
  e.format = j.value("format", e.path.extension() == ".csv" ? std::string("csv") : std::string("raw"));
  if (e.format != "csv" && e.format != "raw") throw ConfigError("dataset format must be csv or raw");
  if (j.contains("descriptor")) e.descriptor = resolve(base, j.at("descriptor").get<std::string>());
  e.dtype = parse_dtype(j.value("dtype", std::string("f64")));
  e.header = j.value("header", true);
  if (j.contains("split")) {
    const Json& s = j.at("split");
    check_keys(s, {"train_fraction", "seed", "shuffled"}, "split");
    e.split.train_fraction = s.value("train_fraction", e.split.train_fraction);
    e.split.seed = s.value("seed", e.split.seed);
    e.split.shuffled = s.value("shuffled", e.split.shuffled);
  }
  if (!fs::exists(e.path)) throw DataError("dataset file not found: " + e.path.string());
  if (e.format == "raw") {
    const fs::path desc = e.descriptor ? *e.descriptor : fs::path(descriptor_path(e.path.string()));
    if (!fs::exists(desc)) throw DataError("raw descriptor not found: " + desc.string());
  }
  return e;
}

}  // namespace

MethodEntry method_entry_from_json(const Json& j) {
  check_keys(j, {"method", "mode", "bound_min", "bound_max", "scale", "layout", "fixed", "sweep", "bounds"},
             "method entry");
  MethodEntry m;
  SearchDomain& d = m.domain;
  d.method = parse_method(j.at("method").get<std::string>());
  d.mode = parse_mode(j.value("mode", std::string("NONE")));
  d.layout = parse_layout(j.value("layout", std::string("by_column")));
  d.scale = parse_scale(j.value("scale", std::string("log10")));
  if (j.contains("fixed")) d.fixed = fixed_from_json(j.at("fixed"));
  if (j.contains("bounds")) {
    for (const auto& b : j.at("bounds")) m.bounds.push_back(b.get<double>());
  }
  const bool sweepable = d.method != Method::none && d.method != Method::lossless &&
                         d.method != Method::trunc;
  m.sweep = j.value("sweep", sweepable && m.bounds.empty());
  if (m.sweep) {
    if (!sweepable) throw ConfigError(std::string(to_string(d.method)) + " has no bound to sweep");
    if (!j.contains("bound_min") || !j.contains("bound_max")) {
      throw ConfigError("method entry " + std::string(to_string(d.method)) + " needs bound_min and bound_max");
    }
    d.bound_min = j.at("bound_min").get<double>();
    d.bound_max = j.at("bound_max").get<double>();
    d.validate();
  } else if (d.method != Method::none && d.method != Method::lossless) {
    for (double b : m.bounds) d.config(b).validate();
  } else {
    d.config(0).validate();
  }
  return m;
}

CampaignFile parse_campaign(const Json& j, const fs::path& base_dir) {
  check_keys(j,
             {"schema_version", "seed", "datasets", "applications", "methods", "evaluate", "search",
              "compress_target", "output", "bandwidths_gbps", "description"},
             "campaign");
  const int version = j.value("schema_version", 0);
  if (version != kCampaignSchemaVersion) {
    throw ConfigError("campaign schema_version must be " + std::to_string(kCampaignSchemaVersion));
  }
  CampaignFile c;
  c.base_dir = base_dir;
  c.seed = j.value("seed", c.seed);
  std::size_t i = 0;
  for (const auto& d : j.at("datasets")) c.datasets.push_back(dataset_from_json(d, base_dir, i++));
  if (c.datasets.empty()) throw ConfigError("campaign needs at least one dataset");
  for (const auto& a : j.at("applications")) c.apps.push_back(application_from_json(a));
  if (c.apps.empty()) throw ConfigError("campaign needs at least one application");
  std::set<std::string> ids;
  for (const auto& a : c.apps) {
    if (!ids.insert(a.id).second) throw ConfigError("duplicate application id " + a.id);
  }
  if (j.contains("methods")) {
    for (const auto& m : j.at("methods")) c.methods.push_back(method_entry_from_json(m));
  }
  if (j.contains("evaluate")) {
    for (const auto& e : j.at("evaluate")) {
      ReducerConfig rc = config_from_json(e);
      rc.validate();
      c.evaluate.push_back(std::move(rc));
    }
  }
  if (j.contains("search")) {
    const Json& s = j.at("search");
    check_keys(s, {"tau", "N", "eta", "max_iters", "replicates", "bound_rtol"}, "search");
    c.spec.tau = s.value("tau", c.spec.tau);
    c.spec.n_candidates = s.value("N", c.spec.n_candidates);
    c.spec.eta = s.value("eta", c.spec.eta);
    c.spec.max_iters = s.value("max_iters", c.spec.max_iters);
    c.spec.replicates = s.value("replicates", c.spec.replicates);
    c.spec.bound_rtol = s.value("bound_rtol", c.spec.bound_rtol);
  }
  c.spec.validate();
  c.target = parse_compress_target(j.value("compress_target", std::string("both")));
  if (j.contains("output")) {
    const Json& o = j.at("output");
    check_keys(o, {"store", "cache", "report_dir"}, "output");
    if (o.contains("store")) c.output.store = o.at("store").get<std::string>();
    if (o.contains("cache")) c.output.cache = o.at("cache").get<std::string>();
    if (o.contains("report_dir")) c.output.report_dir = o.at("report_dir").get<std::string>();
  }
  c.output.store = resolve(base_dir, c.output.store.string());
  c.output.cache = resolve(base_dir, c.output.cache.string());
  c.output.report_dir = resolve(base_dir, c.output.report_dir.string());
  std::vector<double> gbps = j.value("bandwidths_gbps", std::vector<double>{3.75, 1.0, 0.125});
  for (double g : gbps) {
    if (!(g > 0)) throw ConfigError("bandwidths must be > 0");
    c.bandwidths.push_back(g * kGB);
  }
  return c;
}

CampaignFile load_campaign_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open campaign file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("campaign file " + path.string() + ": " + e.what());
  }
  try {
    return parse_campaign(j, fs::absolute(path).parent_path());
  } catch (const Json::exception& e) {
    throw ConfigError("campaign file " + path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const DatasetEntry& e) {
  if (e.format == "csv") {
    CsvOptions o;
    o.header = e.header;
    o.dtype = e.dtype;
    return load_csv(e.path.string(), o);
  }
  const fs::path desc = e.descriptor ? *e.descriptor : fs::path(descriptor_path(e.path.string()));
  return load_raw(e.path.string(), read_descriptor(desc.string()));
}

DatasetPair load_pair(const DatasetEntry& e) { return split(load_dataset(e), e.split); }

}  // namespace ppress
