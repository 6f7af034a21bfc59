#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppress/campaign.hpp"
#include "ppress/perfmodel.hpp"

namespace ppress {

inline constexpr int kCampaignSchemaVersion = 1;

struct DatasetEntry {
  std::string id;
  std::filesystem::path path;
  std::string format = "csv";  // csv | raw
  std::optional<std::filesystem::path> descriptor;  // raw only; default "<path>.desc"
  DType dtype = DType::f64;
  bool header = true;
  SplitSpec split;
};

struct OutputPaths {
  std::filesystem::path store = "ppress-results/records.jsonl";
  std::filesystem::path cache = "ppress-results/cache";
  std::filesystem::path report_dir = "ppress-results/report";
};

// Declarative campaign (JSON). Relative paths resolve against the file's
// directory. See docs/campaign.schema.json.
struct CampaignFile {
  std::filesystem::path base_dir;
  std::uint64_t seed = 0;
  std::vector<DatasetEntry> datasets;
  std::vector<Application> apps;
  std::vector<MethodEntry> methods;
  std::vector<ReducerConfig> evaluate;  // explicit configs for `eval`
  SearchSpec spec;
  CompressTarget target = CompressTarget::both;
  OutputPaths output;
  std::vector<double> bandwidths;  // bytes/s, for the report's cores table
};

// Throws ConfigError (schema) or DataError (unresolvable paths).
CampaignFile parse_campaign(const Json& j, const std::filesystem::path& base_dir);
CampaignFile load_campaign_file(const std::filesystem::path& path);

MethodEntry method_entry_from_json(const Json& j);

Dataset load_dataset(const DatasetEntry& e);
DatasetPair load_pair(const DatasetEntry& e);

}  // namespace ppress
