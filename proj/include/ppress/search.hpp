#pragma once

#include <functional>
#include <vector>

#include "ppress/reducers.hpp"

namespace ppress {

enum class Scale : std::uint8_t { linear, log10 };
std::string_view to_string(Scale s);
Scale parse_scale(std::string_view s);

// Feasible nonfixed parameter range of one method/mode plus its fixed params.
struct SearchDomain {
  Method method = Method::eblc_pred;
  Mode mode = Mode::rel;
  double bound_min = 0;
  double bound_max = 0;
  Scale scale = Scale::log10;
  Layout layout = Layout::by_column;
  FixedParams fixed;

  void validate() const;
  ReducerConfig config(double bound) const;
  // PREC and naive stride take integer bounds.
  bool integer() const;
  // True when a larger bound loses less information (PREC, RATE, PSNR,
  // SAMPLE_WR, SAMPLE_WOR).
  bool inverted() const;
  // Quality is not expected to be monotone in the bound (sampling).
  bool noisy() const { return is_sampling(method); }

  // Lossiness coordinate t in [0, 1] (0 = least lossy end of the domain)
  // to bound and back, on the domain's scale.
  double bound_at(double t) const;
};

struct SearchSpec {
  double tau = 0.7;
  int n_candidates = 8;
  double eta = 1e-3;
  int max_iters = 30;
  int replicates = 1;
  // Bisection stops once adjacent probes differ by less than this relative
  // amount (or by one unit on integer domains).
  double bound_rtol = 1e-4;

  void validate() const;
};

// Quality at a given bound. The campaign supplies one that runs the
// application (median over replicates); tests supply closed forms.
using QualityOracle = std::function<double(double bound)>;

struct Probe {
  double bound = 0;
  double psi = 0;
};

struct BoundaryResult {
  double bound = 0;
  // find_upper: no bound met the tolerance. find_lower: unused.
  bool not_diagnostically_lossless = false;
  bool budget_exhausted = false;
  std::vector<Probe> probes;
};

// Largest-loss bound whose |phi - psi| <= eta * |phi|.
BoundaryResult find_upper(const SearchDomain& domain, const SearchSpec& spec, double phi,
                          const QualityOracle& quality);
// Largest-loss bound whose psi > tau. Throws InfeasibleError when phi <= tau
// or when the least lossy bound already fails.
BoundaryResult find_lower(const SearchDomain& domain, const SearchSpec& spec, double phi,
                          const QualityOracle& quality);

// Uniform grid of 2 * max_iters probes in the lossiness coordinate, used in
// place of bisection for noisy (sampling) domains.
std::vector<double> prescan_bounds(const SearchDomain& domain, const SearchSpec& spec);
BoundaryResult select_upper(const SearchDomain& domain, const SearchSpec& spec, double phi,
                            const std::vector<Probe>& scan);
BoundaryResult select_lower(const SearchDomain& domain, const SearchSpec& spec, double phi,
                            const std::vector<Probe>& scan);

struct CandidateSet {
  std::vector<double> bounds;  // bounds[0] = l, bounds.back() = u
  bool degenerate = false;     // l == u
};

// N arithmetically spaced bounds from l to u inclusive. Integer domains round
// and drop duplicates.
CandidateSet candidate_points(double l, double u, int n, bool integer = false);

}  // namespace ppress
