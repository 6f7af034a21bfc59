#include "ppress/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ppress/error.hpp"
#include "ppress/quality.hpp"

namespace ppress {

namespace fs = std::filesystem;

namespace {

std::string g(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::vector<AppFronts> fronts_by_app(const std::vector<EvaluationRecord>& records) {
  std::map<std::string, std::vector<EvaluationRecord>> by_app;
  for (const auto& r : records) by_app[r.app_id].push_back(r);
  std::vector<AppFronts> out;
  for (const auto& [app, recs] : by_app) {
    AppFronts f;
    f.app_id = app;
    f.metric = recs.front().metric;
    f.points = points_from_records(recs);
    if (f.points.empty()) {
      out.push_back(std::move(f));
      continue;
    }
    f.global = pareto_front(f.points, Scope::global);
    f.per_method = per_method_fronts(f.points);
    f.dominated = dominated_methods(f.points, f.global);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<BoundaryRow> boundaries_from_records(const std::vector<EvaluationRecord>& records) {
  std::vector<BoundaryRow> rows;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> seen_cand, seen_probe;
  for (const auto& r : records) {
    const bool cand = r.role == "candidate";
    const bool probe = r.role == "probe_upper" || r.role == "probe_lower" || r.role == "prescan";
    if (!cand && !probe) continue;
    const auto key = std::make_pair(r.app_id, r.label);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back({r.app_id, r.label, 0, 0, 0, 0});
    }
    BoundaryRow& row = rows[it->second];
    if (probe) {
      if (seen_probe[key].insert(r.record_id).second) ++row.probes;
      continue;
    }
    if (!seen_cand[key].insert(r.record_id).second) continue;
    if (row.candidates == 0) row.lower = r.config.primary();
    row.upper = r.config.primary();
    ++row.candidates;
  }
  return rows;
}

std::string svg_file_name(const std::string& app_id) {
  std::string s = "front_";
  for (char c : app_id) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s + ".svg";
}

std::string markdown_report(const std::vector<EvaluationRecord>& records,
                            const std::vector<double>& bandwidths, const std::string& timestamp) {
  std::ostringstream md;
  md << "# Compression evaluation report\n\n";
  md << "Generated: " << timestamp << "\n\n";
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.ok ? 0 : 1;
  md << "Records: " << records.size() << " (" << failed << " failed)\n\n";

  md << "## Baseline quality\n\n";
  std::map<std::string, std::vector<double>> base;
  std::map<std::string, std::string> metric;
  for (const auto& r : records) {
    if (r.ok && r.role == "baseline") {
      base[r.app_id].push_back(r.psi);
      metric[r.app_id] = r.metric;
    }
  }
  if (base.empty()) {
    md << "_No baseline records._\n\n";
  } else {
    md << "| application | metric | phi | spread | replicates |\n|---|---|---|---|---|\n";
    for (const auto& [app, v] : base) {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      md << "| " << app << " | " << metric[app] << " | " << g(median(v), "%.10g") << " | "
         << g(*hi - *lo) << " | " << v.size() << " |\n";
    }
    md << '\n';
  }

  md << "## Search boundaries\n\n";
  const auto bounds = boundaries_from_records(records);
  if (bounds.empty()) {
    md << "_No searches._\n\n";
  } else {
    md << "| application | method | l | u | candidates | probes |\n|---|---|---|---|---|---|\n";
    for (const auto& b : bounds) {
      md << "| " << b.app_id << " | " << b.label << " | " << g(b.lower) << " | " << g(b.upper)
         << " | " << b.candidates << " | " << b.probes << " |\n";
    }
    md << '\n';
  }

  md << "## Pareto fronts\n\n";
  const auto fronts = fronts_by_app(records);
  if (fronts.empty()) md << "_No records._\n\n";
  for (const auto& f : fronts) {
    md << "### " << f.app_id << " (" << f.metric << ")\n\n";
    if (f.points.empty()) {
      md << "_No successful evaluations._\n\n";
      continue;
    }
    md << "![front](" << svg_file_name(f.app_id) << ")\n\n";
    md << "Global front:\n\n| method | bound | C | quality | record |\n|---|---|---|---|---|\n";
    for (const auto& p : f.global.points) {
      md << "| " << p.method << " | " << g(p.bound) << " | " << g(p.cr, "%.4g") << " | "
         << g(p.q, "%.8g") << " | " << p.record_id.substr(0, 12) << " |\n";
    }
    md << "\nPer-method front sizes: ";
    for (std::size_t i = 0; i < f.per_method.size(); ++i) {
      md << (i ? ", " : "") << f.per_method[i].method << " " << f.per_method[i].points.size();
    }
    md << "\n\n";
    if (!f.dominated.empty()) {
      md << "Omitted from the global front (strictly dominated): ";
      for (std::size_t i = 0; i < f.dominated.size(); ++i) md << (i ? ", " : "") << f.dominated[i];
      md << "\n\n";
    }
  }

  md << "## Parallel decompression core thresholds\n\n";
  const auto inputs = cores_inputs(records);
  if (inputs.empty()) {
    md << "_No candidate records._\n\n";
  } else {
    md << "```\n" << cores_table(inputs, bandwidths).text() << "```\n";
  }
  return md.str();
}

fs::path write_report(const std::vector<EvaluationRecord>& records,
                      const std::vector<double>& bandwidths, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& f : fronts_by_app(records)) {
    if (f.points.empty()) continue;
    std::vector<Front> all = f.per_method;
    all.push_back(f.global);
    std::ofstream svg(dir / svg_file_name(f.app_id));
    svg << fronts_svg(f.points, all, f.app_id + " (" + f.metric + ")");
  }
  const fs::path path = dir / "report.md";
  std::ofstream out(path);
  out << markdown_report(records, bandwidths, utc_timestamp());
  if (!out) throw Error("cannot write " + path.string());
  return path;
}

}  // namespace ppress
