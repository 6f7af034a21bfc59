#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppress/records.hpp"

namespace ppress {

inline constexpr double kGB = 1e9;  // decimal gigabyte, as in the tables

// Moving `size` bytes over a link of bandwidth b_n, optionally compressed by
// ratio C and decompressed on s_p cores at b_c bytes/s per core. Bandwidths
// are bytes/s.
struct TransferScenario {
  double size = 0;
  double b_n = 0;
  double b_c = 0;
  double s_p = 1;
  double C = 1;
  double efficiency = 1;  // parallel scaling efficiency; speedup = efficiency * s_p

  void validate() const;
};

double time_uncompressed(const TransferScenario& s);
double time_compressed(const TransferScenario& s);

double speedup(double C, double s_p, double b_c, double b_n);
// s_p at which speedup == 1: C b_n / (b_c (C - 1)). Requires C > 1.
double core_threshold(double C, double b_c, double b_n);
// Smallest integer s_p with s_p * efficiency > threshold, at least 1.
// Throws InfeasibleError when C <= 1.
std::int64_t min_cores(double C, double b_c, double b_n, double efficiency = 1.0);

struct CoresInput {
  std::string label;
  double bound = 0;
  double psnr = 0;
  double C = 0;
  double b_c = 0;  // bytes/s
};

struct CoresTable {
  std::vector<double> bandwidths;  // bytes/s
  std::vector<CoresInput> rows;
  // cores[row][bandwidth]; nullopt marks an infeasible row (C <= 1).
  std::vector<std::vector<std::optional<std::int64_t>>> cores;

  // Header: label,bound,psnr_db,C,b_c_GBps,cores_at_<bw>GBps...
  std::string csv() const;
  std::string text() const;
};

// Bandwidths in bytes/s; every bandwidth must be > 0.
CoresTable cores_table(const std::vector<CoresInput>& rows, const std::vector<double>& bandwidths);
// Successful, non-sampling candidate rows of a record store, one per
// (label, bound) with the median C and b_c over distinct records.
std::vector<CoresInput> cores_inputs(const std::vector<EvaluationRecord>& records);
// CSV with columns C,b_c (GB/s) and optional label,bound,psnr.
std::vector<CoresInput> parse_cores_csv(const std::string& text);

}  // namespace ppress
