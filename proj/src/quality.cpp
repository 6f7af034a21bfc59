#include "ppress/quality.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppress/error.hpp"
#include "ppress/rng.hpp"

namespace ppress {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw DataError("metric inputs differ in length");
}

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::VectorXd;

// Columns of d except `skip` as an n x p matrix.
Matrix feature_matrix(const Dataset& d, std::size_t skip) {
  const std::size_t p = d.n_feat() - (skip < d.n_feat() ? 1 : 0);
  Matrix x(static_cast<Eigen::Index>(d.n_obs()), static_cast<Eigen::Index>(p));
  Eigen::Index c = 0;
  for (std::size_t j = 0; j < d.n_feat(); ++j) {
    if (j == skip) continue;
    auto col = d.column(j);
    for (std::size_t i = 0; i < col.size(); ++i) x(static_cast<Eigen::Index>(i), c) = col[i];
    ++c;
  }
  return x;
}

std::size_t resolve_target(const Dataset& d, const std::string& target) {
  if (target.empty()) return 0;
  if (auto idx = d.column_index(target)) return *idx;
  std::size_t v = 0;
  const auto* end = target.data() + target.size();
  const auto [p, ec] = std::from_chars(target.data(), end, v);
  if (ec == std::errc() && p == end && v < d.n_feat()) return v;
  throw ConfigError("target column '" + target + "' not found");
}

Confusion confusion_of(std::span<const int> predicted, std::span<const int> truth) {
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == 1) {
      (truth[i] == 1 ? c.tp : c.fp)++;
    } else {
      (truth[i] == 1 ? c.fn : c.tn)++;
    }
  }
  return c;
}

}  // namespace

std::string_view to_string(MetricName m) {
  switch (m) {
    case MetricName::r2: return "R2";
    case MetricName::accuracy: return "ACCURACY";
    case MetricName::gmean: return "GMEAN";
    case MetricName::mse: return "MSE";
    case MetricName::psnr: return "PSNR";
  }
  return "?";
}

MetricName parse_metric(std::string_view s) {
  const std::string l = lower(s);
  if (l == "r2") return MetricName::r2;
  if (l == "accuracy") return MetricName::accuracy;
  if (l == "gmean" || l == "g_mean") return MetricName::gmean;
  if (l == "mse") return MetricName::mse;
  if (l == "psnr") return MetricName::psnr;
  throw ConfigError("unknown metric: " + std::string(s));
}

std::string_view to_string(Direction d) {
  return d == Direction::higher_better ? "higher_better" : "lower_better";
}

std::string_view to_string(AppKind k) {
  switch (k) {
    case AppKind::ridge_regression: return "ridge_regression";
    case AppKind::knn_classifier: return "knn_classifier";
    case AppKind::lowrank_reconstruction: return "lowrank_reconstruction";
    case AppKind::external: return "external";
  }
  return "?";
}

AppKind parse_app_kind(std::string_view s) {
  const std::string l = lower(s);
  if (l == "ridge_regression" || l == "ridge") return AppKind::ridge_regression;
  if (l == "knn_classifier" || l == "knn") return AppKind::knn_classifier;
  if (l == "lowrank_reconstruction" || l == "lowrank") return AppKind::lowrank_reconstruction;
  if (l == "external") return AppKind::external;
  throw ConfigError("unknown application kind: " + std::string(s));
}

MetricValue r_squared(std::span<const double> predictions, std::span<const double> truth) {
  require_same_length(predictions.size(), truth.size());
  if (truth.size() < 2) throw DataError("R2 needs at least two values");
  const double n = static_cast<double>(truth.size());
  const double mp = std::accumulate(predictions.begin(), predictions.end(), 0.0) / n;
  const double mt = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
  double spp = 0, stt = 0, spt = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double a = predictions[i] - mp;
    const double b = truth[i] - mt;
    spp += a * a;
    stt += b * b;
    spt += a * b;
  }
  if (spp == 0 || stt == 0) return {0.0, true};
  return {std::min(1.0, spt * spt / (spp * stt)), false};
}

MetricValue coefficient_of_determination(std::span<const double> predictions,
                                         std::span<const double> truth) {
  require_same_length(predictions.size(), truth.size());
  if (truth.size() < 2) throw DataError("R2 needs at least two values");
  const double mt = std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - predictions[i]) * (truth[i] - predictions[i]);
    ss_tot += (truth[i] - mt) * (truth[i] - mt);
  }
  if (ss_tot == 0) return {0.0, true};
  return {1.0 - ss_res / ss_tot, false};
}

MetricValue g_mean(const Confusion& c) {
  if (c.tp + c.fn == 0 || c.tp + c.fp == 0) return {0.0, true};
  const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return {std::sqrt(precision * recall), false};
}

double accuracy(const Confusion& c) {
  if (c.total() == 0) throw DataError("accuracy of an empty confusion matrix");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double mse(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size());
  if (a.empty()) throw DataError("mse of empty inputs");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

MetricValue psnr_metric(std::span<const double> a, std::span<const double> b, double range) {
  const double m = mse(a, b);
  if (!(range > 0) || m == 0) return {std::numeric_limits<double>::infinity(), true};
  return {10.0 * std::log10(range * range / m), false};
}

void Application::validate() const {
  const MetricName m = metric.name;
  switch (kind) {
    case AppKind::ridge_regression:
      if (m != MetricName::r2) throw ConfigError("ridge_regression pairs with R2");
      if (!(ridge_lambda_scale >= 0)) throw ConfigError("ridge lambda must be >= 0");
      break;
    case AppKind::knn_classifier:
      if (m != MetricName::accuracy && m != MetricName::gmean) {
        throw ConfigError("knn_classifier pairs with ACCURACY or GMEAN");
      }
      if (knn_k < 1) throw ConfigError("knn k must be >= 1");
      break;
    case AppKind::lowrank_reconstruction:
      if (m != MetricName::mse && m != MetricName::psnr) {
        throw ConfigError("lowrank_reconstruction pairs with MSE or PSNR");
      }
      if (rank < 1) throw ConfigError("rank must be >= 1");
      break;
    case AppKind::external:
      if (external.command.empty()) throw ConfigError("external application needs a command");
      if (!(external.timeout_seconds > 0)) throw ConfigError("timeout must be > 0");
      break;
  }
}

std::vector<double> ridge_predict(const Dataset& train, const Dataset& validation,
                                  std::size_t target, double lambda_scale) {
  if (train.n_feat() < 2) throw ConfigError("ridge regression needs at least one feature");
  const Matrix x = feature_matrix(train, target);
  auto ycol = train.column(target);
  const Vector y = Eigen::Map<const Vector>(ycol.data(), static_cast<Eigen::Index>(ycol.size()));

  // Centering absorbs the intercept.
  const Eigen::RowVectorXd xmean = x.colwise().mean();
  const double ymean = y.mean();
  const Matrix xc = x.rowwise() - xmean;
  Matrix gram = xc.transpose() * xc;
  const auto p = gram.rows();
  const double lambda = lambda_scale * gram.trace() / static_cast<double>(p);
  gram.diagonal().array() += lambda;
  const Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
    throw ApplicationError("ridge regression: singular normal equations");
  }
  const Vector beta = ldlt.solve(xc.transpose() * (y.array() - ymean).matrix());
  if (!beta.allFinite()) throw ApplicationError("ridge regression: non-finite solution");

  const Matrix xv = feature_matrix(validation, target);
  const Vector pred = ((xv.rowwise() - xmean) * beta).array() + ymean;
  return {pred.data(), pred.data() + pred.size()};
}

std::vector<int> knn_predict(const Dataset& train, const Dataset& validation, std::size_t target,
                             int k, double threshold, std::uint64_t seed) {
  if (train.n_feat() < 2) throw ConfigError("knn needs at least one feature");
  const std::size_t n = train.n_obs();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  const Matrix xt = feature_matrix(train, target);
  const Matrix xv = feature_matrix(validation, target);
  auto yt = train.column(target);

  // Random priorities break distance ties.
  std::vector<std::uint64_t> priority(n);
  Rng rng(seed);
  for (auto& p : priority) p = rng.next();

  std::vector<int> out(validation.n_obs());
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      dist[r] = {(xt.row(static_cast<Eigen::Index>(r)) - xv.row(i)).squaredNorm(), r};
    }
    auto closer = [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return priority[a.second] < priority[b.second];
    };
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end(), closer);
    std::size_t votes = 0;
    for (std::size_t m = 0; m < kk; ++m) votes += yt[dist[m].second] >= threshold ? 1 : 0;
    int label;
    if (2 * votes == kk) {
      label = yt[dist[0].second] >= threshold ? 1 : 0;
    } else {
      label = 2 * votes > kk ? 1 : 0;
    }
    out[static_cast<std::size_t>(i)] = label;
  }
  return out;
}

Dataset lowrank_reconstruct(const Dataset& train, const Dataset& validation, int rank) {
  const Matrix xt = feature_matrix(train, train.n_feat());
  const Eigen::RowVectorXd mean = xt.colwise().mean();
  const Matrix xc = xt.rowwise() - mean;
  const Eigen::BDCSVD<Matrix> svd(xc, Eigen::ComputeThinV);
  const Eigen::Index r = std::min<Eigen::Index>(rank, svd.matrixV().cols());
  const Matrix v = svd.matrixV().leftCols(r);
  Matrix xv = feature_matrix(validation, validation.n_feat());
  xv = ((xv.rowwise() - mean) * v * v.transpose()).rowwise() + mean;
  std::vector<std::vector<double>> cols(validation.n_feat());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    cols[j].resize(validation.n_obs());
    for (std::size_t i = 0; i < validation.n_obs(); ++i) {
      cols[j][i] = xv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return Dataset(std::move(cols), validation.names(), DType::f64, true);
}

AppResult run_application(const Dataset& train, const Dataset& validation, const Application& app) {
  return run_application(train, validation, app, app.seed);
}

AppResult run_application(const Dataset& train, const Dataset& validation, const Application& app,
                          std::uint64_t seed) {
  app.validate();
  if (train.n_obs() == 0) throw DataError("empty training set");
  if (train.n_feat() != validation.n_feat()) throw DataError("train/validation column mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  AppResult res;
  switch (app.kind) {
    case AppKind::ridge_regression: {
      const std::size_t t = resolve_target(train, app.target);
      const auto pred = ridge_predict(train, validation, t, app.ridge_lambda_scale);
      const MetricValue m = app.metric.r2_determination
                                ? coefficient_of_determination(pred, validation.column(t))
                                : r_squared(pred, validation.column(t));
      res.psi = m.value;
      res.degenerate = m.degenerate;
      break;
    }
    case AppKind::knn_classifier: {
      const std::size_t t = resolve_target(train, app.target);
      const auto pred = knn_predict(train, validation, t, app.knn_k, app.metric.threshold, seed);
      std::vector<int> truth;
      for (double v : validation.column(t)) truth.push_back(v >= app.metric.threshold ? 1 : 0);
      const Confusion c = confusion_of(pred, truth);
      if (app.metric.name == MetricName::accuracy) {
        res.psi = accuracy(c);
      } else {
        const MetricValue m = g_mean(c);
        res.psi = m.value;
        res.degenerate = m.degenerate;
      }
      break;
    }
    case AppKind::lowrank_reconstruction: {
      const Dataset rec = lowrank_reconstruct(train, validation, app.rank);
      const auto a = validation.row_major();
      const auto b = rec.row_major();
      if (app.metric.name == MetricName::mse) {
        res.psi = mse(a, b);
      } else {
        const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
        const MetricValue m = psnr_metric(a, b, *hi - *lo);
        res.psi = m.value;
        res.degenerate = m.degenerate;
      }
      break;
    }
    case AppKind::external: {
      const AppResult ext = run_external(train, validation, app, seed);
      res.psi = ext.psi;
      res.degenerate = ext.degenerate;
      break;
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

LosslessQuality lossless_quality(const Dataset& train, const Dataset& validation,
                                 const Application& app, int replicates) {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  LosslessQuality q;
  for (int i = 0; i < replicates; ++i) {
    q.values.push_back(
        run_application(train, validation, app, app.seed + static_cast<std::uint64_t>(i)).psi);
  }
  const auto [lo, hi] = std::minmax_element(q.values.begin(), q.values.end());
  q.spread = *hi - *lo;
  q.phi = median(q.values);
  return q;
}

}  // namespace ppress
