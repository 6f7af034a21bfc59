#pragma once

#include <string>
#include <vector>

#include "ppress/records.hpp"

namespace ppress {

// Objectives: compression ratio (maximize) and quality oriented so that
// larger is better.
struct ObjectivePoint {
  double cr = 0;
  double q = 0;
  std::string record_id;
  std::string method;
  double bound = 0;
};

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

enum class Scope : std::uint8_t { per_method, global };

struct Front {
  Scope scope = Scope::global;
  std::string method;                // empty for the global front
  std::vector<ObjectivePoint> points;  // cr ascending, q strictly decreasing
};

// Non-dominated subset; equal objective pairs collapse to the smallest record_id.
Front pareto_front(std::vector<ObjectivePoint> points, Scope scope = Scope::global);
// O(n^2) reference filter with the same dedup rule (ordered like pareto_front).
std::vector<ObjectivePoint> brute_force_front(const std::vector<ObjectivePoint>& points);
// One front per distinct method, ordered by method name.
std::vector<Front> per_method_fronts(const std::vector<ObjectivePoint>& points);
// Methods with points but none on the global front.
std::vector<std::string> dominated_methods(const std::vector<ObjectivePoint>& points,
                                           const Front& global);

// Area dominated by the front over ref. Throws ConfigError when some member
// does not dominate ref (weakly in both coordinates).
double hypervolume2d(const Front& front, double ref_cr, double ref_q);

// Successful records become points; lower_better metrics are negated here.
// Search probes are skipped unless include_probes is set; repeated record ids
// count once.
std::vector<ObjectivePoint> points_from_records(const std::vector<EvaluationRecord>& records,
                                                bool include_probes = false);

// CSV columns: scope,method,bound,cr,q,record_id
std::string fronts_csv(const std::vector<Front>& fronts);
// Scatter of all points plus one polyline per front (log-scaled cr axis).
std::string fronts_svg(const std::vector<ObjectivePoint>& points, const std::vector<Front>& fronts,
                       const std::string& title = "Compression ratio vs quality");

}  // namespace ppress
