#include "ppress/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "ppress/error.hpp"
#include "ppress/quality.hpp"

namespace ppress {

void TransferScenario::validate() const {
  if (!(size >= 0) || !(b_n > 0) || !(b_c > 0) || !(s_p > 0) || !(C > 0) || !(efficiency > 0)) {
    throw ConfigError("transfer scenario needs positive bandwidths, cores and ratio");
  }
}

double time_uncompressed(const TransferScenario& s) {
  s.validate();
  return s.size / s.b_n;
}

double time_compressed(const TransferScenario& s) {
  s.validate();
  return s.size / (s.efficiency * s.s_p * s.b_c) + s.size / (s.C * s.b_n);
}

double speedup(double C, double s_p, double b_c, double b_n) {
  if (!(C > 0) || !(s_p > 0) || !(b_c > 0) || !(b_n > 0)) {
    throw ConfigError("speedup needs positive inputs");
  }
  return C * s_p * b_c / (C * b_n + s_p * b_c);
}

double core_threshold(double C, double b_c, double b_n) {
  if (!(b_c > 0) || !(b_n > 0)) throw ConfigError("bandwidths must be > 0");
  if (!(C > 1)) throw InfeasibleError("compression ratio <= 1 cannot pay for decompression");
  return C * b_n / (b_c * (C - 1));
}

std::int64_t min_cores(double C, double b_c, double b_n, double efficiency) {
  if (!(efficiency > 0)) throw ConfigError("efficiency must be > 0");
  const double thr = core_threshold(C, b_c, b_n) / efficiency;
  if (thr < 1) return 1;
  if (!(thr < 9e18)) throw InfeasibleError("core count overflows");
  return static_cast<std::int64_t>(std::floor(thr)) + 1;
}

CoresTable cores_table(const std::vector<CoresInput>& rows, const std::vector<double>& bandwidths) {
  if (bandwidths.empty()) throw ConfigError("cores table needs at least one bandwidth");
  for (double b : bandwidths) {
    if (!(b > 0) || !std::isfinite(b)) throw ConfigError("bandwidths must be > 0");
  }
  CoresTable t;
  t.bandwidths = bandwidths;
  t.rows = rows;
  for (const auto& r : rows) {
    std::vector<std::optional<std::int64_t>> line;
    for (double bn : bandwidths) {
      if (!(r.C > 1) || !(r.b_c > 0)) {
        line.push_back(std::nullopt);
      } else {
        line.push_back(min_cores(r.C, r.b_c, bn));
      }
    }
    t.cores.push_back(std::move(line));
  }
  return t;
}

namespace {

std::string num(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string cell(const std::optional<std::int64_t>& c) {
  return c ? std::to_string(*c) : std::string("infeasible");
}

}  // namespace

std::string CoresTable::csv() const {
  std::ostringstream out;
  out << "label,bound,psnr_db,C,b_c_GBps";
  for (double b : bandwidths) out << ",cores_at_" << num(b / kGB) << "GBps";
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << r.label << ',' << num(r.bound) << ',' << num(r.psnr) << ',' << num(r.C) << ','
        << num(r.b_c / kGB);
    for (const auto& c : cores[i]) out << ',' << cell(c);
    out << '\n';
  }
  return out.str();
}

std::string CoresTable::text() const {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head{"label", "bound", "PSNR", "C", "b_c (GB/s)"};
  for (double b : bandwidths) head.push_back(num(b / kGB) + " GB/s");
  grid.push_back(head);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::vector<std::string> line{r.label, num(r.bound), num(r.psnr, "%.1f"), num(r.C, "%.2f"),
                                  num(r.b_c / kGB, "%.3f")};
    for (const auto& c : cores[i]) line.push_back(cell(c));
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(head.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t j = 0; j < line.size(); ++j) widths[j] = std::max(widths[j], line[j].size());
  }
  std::ostringstream out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t j = 0; j < grid[k].size(); ++j) {
      if (j) out << "  ";
      const std::string& s = grid[k][j];
      if (j == 0) {
        out << s << std::string(widths[j] - s.size(), ' ');
      } else {
        out << std::string(widths[j] - s.size(), ' ') << s;
      }
    }
    out << '\n';
    if (k == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out << std::string(total + 2 * (widths.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

std::vector<CoresInput> cores_inputs(const std::vector<EvaluationRecord>& records) {
  // Replicates and repeated runs collapse to one row per (label, bound).
  struct Acc {
    double psnr = 0;
    std::vector<double> ratio, bandwidth;
    std::set<std::string> ids;
  };
  std::map<std::pair<std::string, double>, Acc> groups;
  for (const auto& r : records) {
    if (!r.ok || r.role != "candidate" || is_sampling(r.config.method)) continue;
    Acc& a = groups[{r.label, r.config.primary()}];
    if (!a.ids.insert(r.record_id).second) continue;
    a.psnr = r.errors.psnr_db;
    a.ratio.push_back(r.ratio);
    a.bandwidth.push_back(r.decompress_bandwidth);
  }
  std::vector<CoresInput> out;
  for (const auto& [key, a] : groups) {
    out.push_back({key.first, key.second, a.psnr, median(a.ratio), median(a.bandwidth)});
  }
  std::stable_sort(out.begin(), out.end(), [](const CoresInput& a, const CoresInput& b) {
    if (a.label != b.label) return a.label < b.label;
    return a.bound > b.bound;
  });
  return out;
}

std::vector<CoresInput> parse_cores_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      while (!item.empty() && (item.back() == '\r' || item.back() == ' ')) item.pop_back();
      while (!item.empty() && item.front() == ' ') item.erase(item.begin());
      parts.push_back(item);
    }
    return parts;
  };
  if (!std::getline(in, line)) throw DataError("empty cores CSV");
  header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  const std::string bc_key = col.count("b_c") ? "b_c" : "b_c_GBps";
  if (!col.count("C") || !col.count(bc_key)) throw DataError("cores CSV needs columns C and b_c");
  std::vector<CoresInput> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto parts = split(line);
    auto field = [&](const std::string& k) -> std::string {
      auto it = col.find(k);
      if (it == col.end() || it->second >= parts.size()) return "";
      return parts[it->second];
    };
    auto number = [&](const std::string& k, double dflt) {
      const std::string s = field(k);
      if (s.empty()) return dflt;
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (*end != '\0') throw DataError("cores CSV line " + std::to_string(lineno) + ": bad " + k);
      return v;
    };
    CoresInput r;
    r.label = field("label");
    r.bound = number("bound", 0);
    r.psnr = number(col.count("psnr") ? "psnr" : "psnr_db", 0);
    r.C = number("C", 0);
    r.b_c = number(bc_key, 0) * kGB;
    out.push_back(r);
  }
  return out;
}

}  // namespace ppress
