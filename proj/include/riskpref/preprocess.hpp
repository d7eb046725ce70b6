#pragma once

// Turns a DataTable into model-ready matrices: M-estimate encoding of
// categoricals, chained gradient-boosting imputation of numericals, stratified
// splitting, k-fold indexing and standardization.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "riskpref/models.hpp"
#include "riskpref/synthdata.hpp"

namespace riskpref::preprocess {

using models::Matrix;
using models::Vector;

// --- M-estimate encoding ------------------------------------------------------

struct CategoryLevel {
  std::size_t count = 0;
  double target_mean = 0.0;
  double encoded = 0.0;
};

struct CategoryMap {
  std::string feature;
  std::map<double, CategoryLevel> levels;
  std::optional<CategoryLevel> missing_level;  // missing cells form their own level
};

struct MEstimateEncoder {
  double smoothing = 1.0;  // M
  double global_mean = 0.0;
  std::vector<CategoryMap> features;

  // (count * mean + M * global) / (count + M); unseen levels map to the global mean.
  double encode_value(const CategoryMap& map, std::optional<double> value) const;
};

double mestimate(std::size_t count, double category_mean, double global_mean, double smoothing);

// Fits one map per categorical column. Throws ValidationError if M < 0,
// the target length differs or the target has non-finite values.
MEstimateEncoder fit_mestimate(const DataTable& train, std::span<const double> target, double smoothing = 1.0);
// Categorical columns become fully observed numerical columns.
DataTable encode(const MEstimateEncoder& encoder, const DataTable& table);

nlohmann::json encoder_to_json(const MEstimateEncoder& encoder);
MEstimateEncoder encoder_from_json(const nlohmann::json& doc);

// --- iterative imputation -----------------------------------------------------

struct ImputeConfig {
  int max_rounds = 10;
  double tol = 1e-3;  // stop when the largest absolute cell change in a round is below this
  models::ModelSpec learner = default_learner();

  static models::ModelSpec default_learner();
  void validate() const;
};

struct ImputeResult {
  DataTable table;
  int rounds = 0;
  double last_change = 0.0;
  std::vector<std::string> order;  // imputation order (descending missingness)
};

// Fills every missing numerical cell. Throws ValidationError naming the
// column when a column is entirely missing, or when a categorical column
// still has missing cells (encode first).
ImputeResult iterative_impute(const DataTable& table, const ImputeConfig& config, std::uint64_t seed);
// Baseline: every missing numerical cell replaced with its column median.
DataTable median_impute(const DataTable& table);

nlohmann::json impute_report_json(const ImputeConfig& config, const ImputeResult& result);

// --- splitting ------------------------------------------------------------------

struct SplitPlan {
  double test_fraction = 0.2;
  int strata_bins = 10;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
  bool stratified = true;          // false: degenerate target, plain random split
};

// |test| = round(n * test_fraction), allocated across equal-frequency target
// bins by largest remainder.
SplitIndices stratified_split(std::span<const double> target, const SplitPlan& plan);
SplitIndices random_split(std::size_t n, double test_fraction, std::uint64_t seed);

// k folds partitioning 0..n-1, sizes differing by at most one (the first n % k
// folds are larger); each fold ascending.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

// --- standardization ------------------------------------------------------------

struct Standardizer {
  Vector mean;
  Vector sd;                  // sample standard deviation (n - 1)
  std::vector<char> constant;  // constant columns pass through unchanged

  Matrix apply(const Matrix& X) const;
};

Standardizer fit_standardize(const Matrix& train);

nlohmann::json standardizer_to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& doc);

// --- matrices ---------------------------------------------------------------------

// Feature columns as a dense matrix. Throws ValidationError on missing cells.
Matrix to_matrix(const DataTable& table);
Vector to_vector(std::span<const double> v);

}  // namespace riskpref::preprocess
