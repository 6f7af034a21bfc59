#include "ppress/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "ppress/error.hpp"

namespace ppress {

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  return a.cr >= b.cr && a.q >= b.q && (a.cr > b.cr || a.q > b.q);
}

namespace {

bool by_cr_asc(const ObjectivePoint& a, const ObjectivePoint& b) {
  if (a.cr != b.cr) return a.cr < b.cr;
  if (a.q != b.q) return a.q > b.q;
  return a.record_id < b.record_id;
}

}  // namespace

Front pareto_front(std::vector<ObjectivePoint> points, Scope scope) {
  Front f;
  f.scope = scope;
  if (scope == Scope::per_method && !points.empty()) f.method = points.front().method;
  // Sweep from the largest cr down, keeping points that raise the best q.
  std::sort(points.begin(), points.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
    if (a.cr != b.cr) return a.cr > b.cr;
    if (a.q != b.q) return a.q > b.q;
    return a.record_id < b.record_id;
  });
  double best = -std::numeric_limits<double>::infinity();
  for (auto& p : points) {
    if (p.q > best) {
      best = p.q;
      f.points.push_back(std::move(p));
    }
  }
  std::reverse(f.points.begin(), f.points.end());
  return f;
}

std::vector<ObjectivePoint> brute_force_front(const std::vector<ObjectivePoint>& points) {
  std::vector<ObjectivePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < points.size() && keep; ++j) {
      if (j == i) continue;
      if (dominates(points[j], points[i])) keep = false;
      // Duplicate objectives: only the smallest record_id survives.
      if (points[j].cr == points[i].cr && points[j].q == points[i].q &&
          (points[j].record_id < points[i].record_id ||
           (points[j].record_id == points[i].record_id && j < i))) {
        keep = false;
      }
    }
    if (keep) out.push_back(points[i]);
  }
  std::sort(out.begin(), out.end(), by_cr_asc);
  return out;
}

std::vector<Front> per_method_fronts(const std::vector<ObjectivePoint>& points) {
  std::map<std::string, std::vector<ObjectivePoint>> groups;
  for (const auto& p : points) groups[p.method].push_back(p);
  std::vector<Front> out;
  for (auto& [name, pts] : groups) {
    Front f = pareto_front(std::move(pts), Scope::per_method);
    f.method = name;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::string> dominated_methods(const std::vector<ObjectivePoint>& points,
                                           const Front& global) {
  std::set<std::string> all, on_front;
  for (const auto& p : points) all.insert(p.method);
  for (const auto& p : global.points) on_front.insert(p.method);
  std::vector<std::string> out;
  for (const auto& m : all) {
    if (!on_front.count(m)) out.push_back(m);
  }
  return out;
}

double hypervolume2d(const Front& front, double ref_cr, double ref_q) {
  for (const auto& p : front.points) {
    if (p.cr < ref_cr || p.q < ref_q) {
      throw ConfigError("hypervolume reference point is not dominated by every front member");
    }
  }
  const Front f = pareto_front(front.points, front.scope);
  double area = 0;
  double prev_cr = ref_cr;
  for (const auto& p : f.points) {
    area += (p.cr - prev_cr) * (p.q - ref_q);
    prev_cr = p.cr;
  }
  return area;
}

std::vector<ObjectivePoint> points_from_records(const std::vector<EvaluationRecord>& records,
                                                bool include_probes) {
  std::vector<ObjectivePoint> out;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!r.ok || !std::isfinite(r.psi) || !(r.ratio > 0)) continue;
    const bool probe = r.role == "probe_upper" || r.role == "probe_lower" || r.role == "prescan";
    if (probe && !include_probes) continue;
    if (!seen.insert(r.record_id).second) continue;
    const double q = r.direction == Direction::lower_better ? -r.psi : r.psi;
    out.push_back({r.ratio, q, r.record_id, r.label, r.config.primary()});
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string fronts_csv(const std::vector<Front>& fronts) {
  std::ostringstream out;
  out << "scope,method,bound,cr,q,record_id\n";
  for (const auto& f : fronts) {
    const char* scope = f.scope == Scope::global ? "global" : "per_method";
    for (const auto& p : f.points) {
      out << scope << ',' << p.method << ',' << fmt(p.bound) << ',' << fmt(p.cr) << ','
          << fmt(p.q) << ',' << p.record_id << '\n';
    }
  }
  return out.str();
}

std::string fronts_svg(const std::vector<ObjectivePoint>& points, const std::vector<Front>& fronts,
                       const std::string& title) {
  const double w = 720, h = 460, ml = 70, mr = 180, mt = 40, mb = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& p : points) {
    xmin = std::min(xmin, std::log10(p.cr));
    xmax = std::max(xmax, std::log10(p.cr));
    ymin = std::min(ymin, p.q);
    ymax = std::max(ymax, p.q);
  }
  if (points.empty()) {
    xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  }
  if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  auto sx = [&](double cr) { return ml + (std::log10(cr) - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto sy = [&](double q) { return h - mb - (q - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::map<std::string, std::string> color;
  for (const auto& p : points) color.emplace(p.method, "");
  std::size_t ci = 0;
  for (auto& [m, c] : color) c = kPalette[ci++ % std::size(kPalette)];

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << ml << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
    << "\" text-anchor=\"middle\">compression ratio (log10)</text>\n";
  s << "<text x=\"14\" y=\"" << (mt + h - mb) / 2 << "\" transform=\"rotate(-90 14 "
    << (mt + h - mb) / 2 << ")\" text-anchor=\"middle\">quality</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    s << "<text x=\"" << fmt3(sx(std::pow(10.0, xv))) << "\" y=\"" << h - mb + 14
      << "\" text-anchor=\"middle\">" << fmt3(std::pow(10.0, xv)) << "</text>\n";
    s << "<text x=\"" << ml - 4 << "\" y=\"" << fmt3(sy(yv)) << "\" text-anchor=\"end\">"
      << fmt3(yv) << "</text>\n";
  }
  for (const auto& p : points) {
    s << "<circle cx=\"" << fmt3(sx(p.cr)) << "\" cy=\"" << fmt3(sy(p.q)) << "\" r=\"3\" fill=\""
      << color[p.method] << "\" fill-opacity=\"0.6\"/>\n";
  }
  for (const auto& f : fronts) {
    if (f.points.empty()) continue;
    const bool global = f.scope == Scope::global;
    s << "<polyline fill=\"none\" stroke=\"" << (global ? "black" : color[f.method])
      << "\" stroke-width=\"" << (global ? 2 : 1) << "\""
      << (global ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (const auto& p : f.points) s << fmt3(sx(p.cr)) << ',' << fmt3(sy(p.q)) << ' ';
    s << "\"/>\n";
  }
  double ly = mt;
  for (const auto& [m, c] : color) {
    s << "<rect x=\"" << w - mr + 12 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\""
      << c << "\"/>\n";
    s << "<text x=\"" << w - mr + 28 << "\" y=\"" << ly + 9 << "\">" << xml_escape(m) << "</text>\n";
    ly += 16;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace ppress
