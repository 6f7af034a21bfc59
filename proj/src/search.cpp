#include "ppress/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "ppress/error.hpp"

namespace ppress {

std::string_view to_string(Scale s) { return s == Scale::linear ? "linear" : "log10"; }

Scale parse_scale(std::string_view s) {
  if (s == "linear") return Scale::linear;
  if (s == "log10" || s == "log") return Scale::log10;
  throw ConfigError("unknown scale: " + std::string(s));
}

bool SearchDomain::integer() const {
  return (method == Method::eblc_bitplane && mode == Mode::prec) || method == Method::sample_naive;
}

bool SearchDomain::inverted() const {
  return mode == Mode::prec || mode == Mode::rate || mode == Mode::psnr ||
         method == Method::sample_wr || method == Method::sample_wor;
}

void SearchDomain::validate() const {
  if (!(bound_min > 0) || !(bound_max > bound_min) || !std::isfinite(bound_max)) {
    throw ConfigError("search domain needs 0 < bound_min < bound_max");
  }
  config(bound_min).validate();
  config(bound_max).validate();
}

ReducerConfig SearchDomain::config(double bound) const {
  ReducerConfig c;
  c.method = method;
  c.mode = mode;
  c.bound = {bound};
  c.layout = layout;
  c.fixed = fixed;
  return c;
}

double SearchDomain::bound_at(double t) const {
  const double s = inverted() ? 1.0 - t : t;
  if (s <= 0) return bound_min;
  if (s >= 1) return bound_max;
  double b;
  if (scale == Scale::log10) {
    const double lo = std::log10(bound_min);
    const double hi = std::log10(bound_max);
    b = std::pow(10.0, lo + s * (hi - lo));
  } else {
    b = bound_min + s * (bound_max - bound_min);
  }
  if (integer()) b = std::nearbyint(b);
  return std::clamp(b, bound_min, bound_max);
}

void SearchSpec::validate() const {
  if (n_candidates < 2) throw ConfigError("N must be >= 2");
  if (!(eta > 0)) throw ConfigError("eta must be > 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (!(bound_rtol > 0)) throw ConfigError("bound_rtol must be > 0");
}

namespace {

// Bisection in the lossiness coordinate for the largest t whose probe
// passes, given that t = 0 passes. Memoized per bound so integer domains
// never re-probe a rounded value.
class Bisector {
 public:
  Bisector(const SearchDomain& d, const SearchSpec& s, const QualityOracle& q,
           std::function<bool(double)> pass)
      : domain_(d), spec_(s), quality_(q), pass_(std::move(pass)) {}

  std::optional<bool> probe(double t, BoundaryResult& res) {
    const double b = domain_.bound_at(t);
    auto it = memo_.find(b);
    if (it == memo_.end()) {
      if (static_cast<int>(res.probes.size()) >= spec_.max_iters) return std::nullopt;
      const double psi = quality_(b);
      res.probes.push_back({b, psi});
      it = memo_.emplace(b, pass_(psi)).first;
    }
    return it->second;
  }

  bool converged(double lo, double hi) const {
    const double a = domain_.bound_at(lo);
    const double b = domain_.bound_at(hi);
    if (domain_.integer()) return std::fabs(a - b) <= 1;
    return std::fabs(a - b) <= spec_.bound_rtol * std::max(std::fabs(a), std::fabs(b));
  }

  // Returns the t of the last passing probe.
  double run(double lo, double hi, BoundaryResult& res) {
    while (!converged(lo, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double bm = domain_.bound_at(mid);
      if (bm == domain_.bound_at(lo)) {
        lo = mid;
        continue;
      }
      if (bm == domain_.bound_at(hi)) {
        hi = mid;
        continue;
      }
      const auto ok = probe(mid, res);
      if (!ok) {
        res.budget_exhausted = true;
        break;
      }
      (*ok ? lo : hi) = mid;
    }
    return lo;
  }

 private:
  const SearchDomain& domain_;
  const SearchSpec& spec_;
  const QualityOracle& quality_;
  std::function<bool(double)> pass_;
  std::map<double, bool> memo_;
};

bool within_tolerance(double phi, double psi, double eta) {
  return std::fabs(phi - psi) <= eta * std::fabs(phi);
}

}  // namespace

BoundaryResult find_upper(const SearchDomain& domain, const SearchSpec& spec, double phi,
                          const QualityOracle& quality) {
  domain.validate();
  spec.validate();
  BoundaryResult res;
  Bisector bis(domain, spec, quality,
               [&](double psi) { return within_tolerance(phi, psi, spec.eta); });
  const auto at0 = bis.probe(0.0, res);
  if (!*at0) {
    res.bound = domain.bound_at(0.0);
    res.not_diagnostically_lossless = true;
    return res;
  }
  const auto at1 = bis.probe(1.0, res);
  if (!at1) {
    res.bound = domain.bound_at(0.0);
    res.budget_exhausted = true;
    return res;
  }
  if (*at1) {
    res.bound = domain.bound_at(1.0);
    return res;
  }
  res.bound = domain.bound_at(bis.run(0.0, 1.0, res));
  return res;
}

BoundaryResult find_lower(const SearchDomain& domain, const SearchSpec& spec, double phi,
                          const QualityOracle& quality) {
  domain.validate();
  spec.validate();
  if (!(phi > spec.tau)) {
    throw InfeasibleError("no acceptable configuration: baseline quality does not exceed tau");
  }
  BoundaryResult res;
  Bisector bis(domain, spec, quality, [&](double psi) { return psi > spec.tau; });
  const auto at0 = bis.probe(0.0, res);
  if (!*at0) {
    throw InfeasibleError("no acceptable configuration: quality at the least lossy bound is <= tau");
  }
  const auto at1 = bis.probe(1.0, res);
  if (!at1) {
    res.bound = domain.bound_at(0.0);
    res.budget_exhausted = true;
    return res;
  }
  if (*at1) {
    res.bound = domain.bound_at(1.0);
    return res;
  }
  res.bound = domain.bound_at(bis.run(0.0, 1.0, res));
  return res;
}

std::vector<double> prescan_bounds(const SearchDomain& domain, const SearchSpec& spec) {
  const int n = 2 * spec.max_iters;
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    const double b = domain.bound_at(t);
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  }
  return out;
}

namespace {

// Scan entries ordered from least to most lossy.
std::vector<Probe> by_lossiness(const SearchDomain& domain, std::vector<Probe> scan) {
  std::stable_sort(scan.begin(), scan.end(), [&](const Probe& a, const Probe& b) {
    return domain.inverted() ? a.bound > b.bound : a.bound < b.bound;
  });
  return scan;
}

}  // namespace

BoundaryResult select_upper(const SearchDomain& domain, const SearchSpec& spec, double phi,
                            const std::vector<Probe>& scan) {
  if (scan.empty()) throw ConfigError("empty prescan");
  const auto ordered = by_lossiness(domain, scan);
  BoundaryResult res;
  res.probes = scan;
  res.bound = ordered.front().bound;
  res.not_diagnostically_lossless = true;
  for (const auto& p : ordered) {
    if (within_tolerance(phi, p.psi, spec.eta)) {
      res.bound = p.bound;
      res.not_diagnostically_lossless = false;
    }
  }
  return res;
}

BoundaryResult select_lower(const SearchDomain& domain, const SearchSpec& spec, double phi,
                            const std::vector<Probe>& scan) {
  if (scan.empty()) throw ConfigError("empty prescan");
  if (!(phi > spec.tau)) {
    throw InfeasibleError("no acceptable configuration: baseline quality does not exceed tau");
  }
  const auto ordered = by_lossiness(domain, scan);
  if (!(ordered.front().psi > spec.tau)) {
    throw InfeasibleError("no acceptable configuration: quality at the least lossy bound is <= tau");
  }
  BoundaryResult res;
  res.probes = scan;
  for (const auto& p : ordered) {
    if (p.psi > spec.tau) res.bound = p.bound;
  }
  return res;
}

CandidateSet candidate_points(double l, double u, int n, bool integer) {
  if (n < 2) throw ConfigError("N must be >= 2");
  CandidateSet out;
  if (l == u) {
    out.bounds = {l};
    out.degenerate = true;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    double b = i == n - 1 ? u : l + (u - l) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (integer) b = std::nearbyint(b);
    if (out.bounds.empty() || out.bounds.back() != b) out.bounds.push_back(b);
  }
  return out;
}

}  // namespace ppress
