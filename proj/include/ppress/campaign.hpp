#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppress/quality.hpp"
#include "ppress/records.hpp"
#include "ppress/search.hpp"
#include "ppress/tabular.hpp"

namespace ppress {

// Combined id of a (train, validation) split.
std::string pair_id(const DatasetPair& pair);

struct EvalOptions {
  CompressTarget target = CompressTarget::both;
  std::uint64_t seed = 0;
  const RecordCache* cache = nullptr;  // null disables caching
  std::string role = "candidate";
};

// Compresses the selected part(s), decompresses, runs the application on the
// reconstructed data and measures C, bandwidths, psi and errors. Failures are
// returned as records with ok = false. The application runs with opts.seed;
// sampling draws use config.fixed.seed.
EvaluationRecord eval_config(const DatasetPair& data, const std::string& dataset_id,
                             const Application& app, const ReducerConfig& config,
                             const EvalOptions& opts = {});

// A method entry of a campaign. Sweepable methods with a domain go through
// the boundary search; others are evaluated at each listed bound (or once).
struct MethodEntry {
  SearchDomain domain;
  bool sweep = true;
  std::vector<double> bounds;  // for non-swept entries (e.g. TRUNC {16})

  ReducerConfig config(double bound) const { return domain.config(bound); }
  std::string label() const;
};

struct CampaignOptions {
  SearchSpec spec;
  CompressTarget target = CompressTarget::both;
  std::uint64_t seed = 0;
  int jobs = 1;
  const RecordCache* cache = nullptr;
  RecordStore* store = nullptr;  // records are appended in deterministic order
};

struct SearchSummary {
  std::string app_id;
  std::string label;
  double phi = 0;
  double spread = 0;
  bool searched = false;
  bool infeasible = false;
  std::string message;
  double upper = 0;
  bool upper_flag = false;  // not diagnostically lossless
  double lower = 0;
  bool budget_exhausted = false;
  std::vector<double> candidates;
  std::size_t probes = 0;
};

struct CampaignResult {
  std::vector<EvaluationRecord> records;
  std::vector<SearchSummary> searches;
};

struct Baseline {
  double phi = 0;
  double spread = 0;
  std::vector<EvaluationRecord> records;
};

// Replicate i runs NONE with seed + i; phi is the median psi.
Baseline measure_baseline(const DatasetPair& data, const std::string& dataset_id,
                          const Application& app, const CampaignOptions& opts);

CampaignResult run_campaign(const DatasetPair& data, const std::vector<Application>& apps,
                            const std::vector<MethodEntry>& methods, const CampaignOptions& opts);

// Evaluates configs on a bounded worker pool; output order equals input order.
std::vector<EvaluationRecord> eval_many(const DatasetPair& data, const std::string& dataset_id,
                                        const Application& app,
                                        const std::vector<ReducerConfig>& configs,
                                        const std::vector<EvalOptions>& opts, int jobs);

}  // namespace ppress
