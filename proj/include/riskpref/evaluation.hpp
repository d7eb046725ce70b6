#pragma once

// Metrics, cross-validated grid search, RFECV, the model leaderboard and the
// report emitters (importance lists, per-fold box summaries).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "riskpref/models.hpp"
#include "riskpref/preprocess.hpp"
#include "riskpref/synthdata.hpp"

namespace riskpref::evaluation {

using models::Matrix;
using models::Vector;

// --- metrics --------------------------------------------------------------------

struct Metrics {
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double rmsle = 0.0;
  double mape = 0.0;  // fraction, not percent
  std::size_t mape_effective_n = 0;  // rows with |y| >= 1e-9
};

// Throws ValidationError for empty or mismatched inputs, non-finite values,
// or a negative observed value (RMSLE is undefined there).
Metrics metrics(std::span<const double> y, std::span<const double> y_hat);

enum class MetricKind { mae, mse, rmse, r2, rmsle, mape };

std::string_view to_string(MetricKind m) noexcept;
MetricKind parse_metric(std::string_view name);
double value(const Metrics& m, MetricKind kind) noexcept;
// Lower is better: the metric itself, or -r2.
double loss(const Metrics& m, MetricKind kind) noexcept;
// One metric; negative observations only fail when the metric is RMSLE.
double score(std::span<const double> y, std::span<const double> y_hat, MetricKind kind);

// --- cross-validated grid search -----------------------------------------------

struct CvRow {
  models::ModelSpec spec;
  std::vector<double> fold_scores;  // metric value per fold
  double mean_score = 0.0;
  bool failed = false;
  std::string error;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  models::ModelSpec best;
  std::vector<CvRow> table;
  models::FittedModel refit;  // best spec refit on all training rows
};

struct CvOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  MetricKind metric = MetricKind::mape;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Validation score of one spec per fold (folds from kfold_indices).
std::vector<double> cross_val_scores(const models::ModelSpec& spec, const Matrix& X, const Vector& y,
                                     const std::vector<std::vector<std::size_t>>& folds, MetricKind metric);

// Best spec minimizes the mean validation loss; ties go to the earlier grid
// entry. Failed specs are reported and excluded. Throws ValidationError for an
// empty grid and Error if every spec fails.
GridSearchResult grid_search_cv(std::span<const models::ModelSpec> grid, const Matrix& X, const Vector& y,
                                const CvOptions& options);

// --- RFECV ----------------------------------------------------------------------

struct RfecvStep {
  std::vector<std::size_t> features;  // ascending column indices
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct RfecvResult {
  std::vector<RfecvStep> steps;  // p features down to 1
  std::size_t best_step = 0;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> elimination_order;
  MetricKind metric = MetricKind::mape;

  const RfecvStep& best() const { return steps[best_step]; }
};

// Throws ValidationError for families without importances (KNN, dummy).
RfecvResult rfecv(const models::ModelSpec& spec, const Matrix& X, const Vector& y, const CvOptions& options);

// --- leaderboard ----------------------------------------------------------------

struct FamilyGrid {
  models::Family family;
  std::vector<models::ModelSpec> grid;
};

// The tuning manifest: alpha grids log-spaced over 1e-4..1e2, depths 2-6,
// 100-300 boosting rounds, k in {3, 5, 10, 25}.
std::vector<models::ModelSpec> default_grid(models::Family family, std::uint64_t seed);
std::vector<FamilyGrid> default_grids(std::uint64_t seed);
// Overrides from a JSON object {"lasso": [{"alpha": 0.1}, ...], ...}.
std::vector<FamilyGrid> apply_grid_overrides(std::vector<FamilyGrid> grids, const nlohmann::json& overrides,
                                             std::uint64_t seed);

struct LeaderboardRow {
  models::Family family = models::Family::dummy;
  std::optional<Metrics> metrics;  // empty when tuning or refitting failed
  models::ModelSpec best_spec;
  double cv_score = 0.0;
  std::vector<double> cv_fold_scores;     // best spec, one per fold
  std::optional<models::FittedModel> model;  // best spec refit on the training rows
  bool beats_dummy = false;  // on the sort metric
  std::string error;
};

struct EvalReport {
  std::vector<LeaderboardRow> rows;  // sorted by the selection metric
  MetricKind sort_key = MetricKind::mape;
  std::string split;
  std::uint64_t seed = 0;

  const LeaderboardRow& row(models::Family family) const;
};

// Tunes every grid (dummy is added if absent), refits, scores on the test set.
// Per-family failures are recorded in the row.
EvalReport leaderboard(std::span<const FamilyGrid> grids, const Matrix& x_train, const Vector& y_train,
                       const Matrix& x_test, const Vector& y_test, const CvOptions& options,
                       std::string split_descriptor = {});

std::string leaderboard_text(const EvalReport& report);
std::string leaderboard_csv(const EvalReport& report);
nlohmann::json leaderboard_json(const EvalReport& report);

// --- importance and fold distributions -------------------------------------------

struct LassoImportance {
  std::vector<std::pair<std::string, double>> nonzero;  // signed, by |coef| descending
  std::size_t eliminated = 0;
};

LassoImportance lasso_importance(const models::FittedModel& model, std::span<const std::string> feature_names);
std::string lasso_importance_csv(const LassoImportance& imp);

struct BoxSummary {
  std::string model;
  double min = 0.0;  // lowest score inside the lower fence
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;  // highest score inside the upper fence
  std::vector<double> outliers;
};

// Linear-interpolation quantile (positions (n - 1) q on the sorted sample).
double quantile(std::vector<double> sorted_or_not, double q);
// Tukey box summary; throws ValidationError for fewer than four scores.
BoxSummary box_summary(std::string model, std::span<const double> scores);
std::vector<BoxSummary> fold_distribution_export(const std::map<std::string, std::vector<double>>& scores);
std::string fold_distribution_csv(const std::vector<BoxSummary>& boxes);
nlohmann::json fold_distribution_json(const std::vector<BoxSummary>& boxes);

// --- end-to-end pipeline ------------------------------------------------------------

struct PipelineConfig {
  TargetKind target = TargetKind::mpl_avg_safe;
  preprocess::SplitPlan split;
  double smoothing = 1.0;
  preprocess::ImputeConfig impute;
  CvOptions cv;
};

struct PreparedData {
  Matrix x_train;
  Matrix x_test;
  Vector y_train;
  Vector y_test;
  std::vector<std::string> feature_names;
  preprocess::SplitIndices split;
  preprocess::MEstimateEncoder encoder;
  preprocess::Standardizer standardizer;
  int impute_rounds = 0;
};

// Split (stratified on the target), M-estimate encoding fitted on the training
// rows, iterative imputation of the feature matrix, standardization fitted on
// the training rows.
PreparedData prepare(const DataTable& table, const PipelineConfig& config);
std::string split_descriptor(const PipelineConfig& config, const PreparedData& data);

}  // namespace riskpref::evaluation
