#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ppress/pareto.hpp"
#include "ppress/perfmodel.hpp"
#include "ppress/records.hpp"

namespace ppress {

struct AppFronts {
  std::string app_id;
  std::string metric;
  std::vector<ObjectivePoint> points;
  Front global;
  std::vector<Front> per_method;
  std::vector<std::string> dominated;
};

// Groups successful records by application and extracts the fronts.
std::vector<AppFronts> fronts_by_app(const std::vector<EvaluationRecord>& records);

// Boundaries recovered from a store: candidate bounds per (app, method), in
// store order, so the first entry is l and the last is u.
struct BoundaryRow {
  std::string app_id;
  std::string label;
  double lower = 0;
  double upper = 0;
  std::size_t candidates = 0;
  std::size_t probes = 0;
};
std::vector<BoundaryRow> boundaries_from_records(const std::vector<EvaluationRecord>& records);

// Deterministic Markdown. The only time-dependent line is "Generated: <timestamp>".
std::string markdown_report(const std::vector<EvaluationRecord>& records,
                            const std::vector<double>& bandwidths, const std::string& timestamp);

// Writes report.md and front_<app>.svg files into dir; returns the report path.
std::filesystem::path write_report(const std::vector<EvaluationRecord>& records,
                                   const std::vector<double>& bandwidths,
                                   const std::filesystem::path& dir);

std::string svg_file_name(const std::string& app_id);

}  // namespace ppress
