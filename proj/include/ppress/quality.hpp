#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppress/tabular.hpp"

namespace ppress {

enum class MetricName : std::uint8_t { r2, accuracy, gmean, mse, psnr };
enum class Direction : std::uint8_t { higher_better, lower_better };

std::string_view to_string(MetricName m);
MetricName parse_metric(std::string_view s);
std::string_view to_string(Direction d);

struct MetricValue {
  double value = 0;
  bool degenerate = false;  // zero variance, empty class, or +inf PSNR
};

// Squared Pearson correlation.
MetricValue r_squared(std::span<const double> predictions, std::span<const double> truth);
// 1 - SS_res / SS_tot (may be negative).
MetricValue coefficient_of_determination(std::span<const double> predictions,
                                         std::span<const double> truth);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

// sqrt(precision * recall).
MetricValue g_mean(const Confusion& c);
double accuracy(const Confusion& c);
double mse(std::span<const double> a, std::span<const double> b);
// 10 log10(range^2 / mse); +inf with the degenerate flag when mse == 0.
MetricValue psnr_metric(std::span<const double> a, std::span<const double> b, double range);

struct MetricSpec {
  MetricName name = MetricName::r2;
  double threshold = 0.5;          // ACCURACY/GMEAN label threshold
  bool r2_determination = false;   // use 1 - SS_res/SS_tot instead of Pearson

  Direction direction() const {
    return name == MetricName::mse ? Direction::lower_better : Direction::higher_better;
  }
  // Maps a value so that larger is always better.
  double oriented(double v) const { return direction() == Direction::lower_better ? -v : v; }

  bool operator==(const MetricSpec&) const = default;
};

enum class AppKind : std::uint8_t { ridge_regression, knn_classifier, lowrank_reconstruction, external };
std::string_view to_string(AppKind k);
AppKind parse_app_kind(std::string_view s);

// Downstream application. The external command is run through /bin/sh with
// {train}, {validation}, {seed} and {result} replaced by (quoted) values.
// {train}/{validation} are raw binary files with a ".desc" sidecar.
struct ExternalSpec {
  std::string command;
  double timeout_seconds = 600;
};

struct Application {
  std::string id;
  AppKind kind = AppKind::ridge_regression;
  std::string target;  // target column name for supervised kinds
  MetricSpec metric;
  std::uint64_t seed = 0;
  double ridge_lambda_scale = 1e-3;  // lambda = scale * trace(X'X) / n_features
  int knn_k = 5;
  int rank = 1;  // lowrank_reconstruction
  ExternalSpec external;

  // Throws ConfigError for incompatible kind/metric pairs.
  void validate() const;
};

struct AppResult {
  double psi = 0;
  bool degenerate = false;
  double seconds = 0;
};

// Quality of `app` trained on `train` and scored on `validation`.
AppResult run_application(const Dataset& train, const Dataset& validation, const Application& app);
AppResult run_application(const Dataset& train, const Dataset& validation, const Application& app,
                          std::uint64_t seed);

struct LosslessQuality {
  double phi = 0;     // median over replicates
  double spread = 0;  // max - min
  std::vector<double> values;
};

// Replicate i uses seed app.seed + i.
LosslessQuality lossless_quality(const Dataset& train, const Dataset& validation,
                                 const Application& app, int replicates);

double median(std::vector<double> values);

// Individual built-in applications, exposed for testing.
std::vector<double> ridge_predict(const Dataset& train, const Dataset& validation,
                                  std::size_t target, double lambda_scale);
std::vector<int> knn_predict(const Dataset& train, const Dataset& validation, std::size_t target,
                             int k, double threshold, std::uint64_t seed);
// Rank-r reconstruction of validation from a basis fitted on train.
Dataset lowrank_reconstruct(const Dataset& train, const Dataset& validation, int rank);

AppResult run_external(const Dataset& train, const Dataset& validation, const Application& app,
                       std::uint64_t seed);

}  // namespace ppress
