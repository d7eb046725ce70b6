#pragma once

// Regression model zoo behind a single fit/predict contract.
//
// Penalty conventions (intercepts are never penalized; X is used as given):
//   ridge        ||y - Xb||^2 + alpha ||b||^2
//   lasso        (1/2n) ||y - Xb||^2 + alpha ||b||_1
//   elastic net  (1/2n) ||y - Xb||^2 + alpha l1_ratio ||b||_1 + (alpha (1 - l1_ratio) / 2) ||b||^2
//   huber        sum_i H_delta(r_i) + alpha ||b||^2, delta = epsilon * robust residual scale
// so elastic net with l1_ratio = 1 is lasso, and with l1_ratio = 0 it is ridge
// with alpha_ridge = n * alpha.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "riskpref/random.hpp"

namespace riskpref::models {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Family {
  linear_regression,
  ridge,
  lasso,
  elastic_net,
  lasso_lars,
  omp,
  bayesian_ridge,
  huber,
  passive_aggressive,
  knn,
  decision_tree,
  random_forest,
  extra_trees,
  adaboost,
  gradient_boosting,  // depthwise growth
  lightgbm,           // leafwise growth on histogram bins
  catboost,           // oblivious (symmetric) trees on histogram bins
  dummy,
};

inline constexpr std::size_t kFamilyCount = 18;

std::span<const Family> all_families();
// Leaderboard label, e.g. "Orthogonal Matching Pursuit".
std::string_view display_name(Family family) noexcept;
// Stable identifier used in configs, JSON and the CLI, e.g. "omp".
std::string_view family_key(Family family) noexcept;
// Accepts either the key or the display name. Throws ValidationError.
Family parse_family(std::string_view name);
bool is_linear(Family family) noexcept;
bool has_importance(Family family) noexcept;

using Params = std::map<std::string, double>;

struct ModelSpec {
  Family family = Family::dummy;
  Params params;  // overrides on top of default_params(family)
  std::uint64_t seed = 0;

  double param(const std::string& name) const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Every hyperparameter a family accepts, with its default.
const Params& default_params(Family family);
// Throws ValidationError naming the offending hyperparameter.
void validate(const ModelSpec& spec);
std::string describe(const ModelSpec& spec);  // "lasso(alpha=0.01)"

// --- learned state ----------------------------------------------------------

enum class GrowthMode { depthwise, leafwise, oblivious };
std::string_view to_string(GrowthMode mode) noexcept;

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // rows with x[feature] <= threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output (already scaled by the learning rate for boosting)
  double gain = 0.0;   // weighted SSE reduction of this split
  int samples = 0;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  GrowthMode mode = GrowthMode::depthwise;

  double predict_row(const double* row, std::ptrdiff_t stride) const;
  Vector predict(const Matrix& X) const;
  int depth() const;
  std::size_t leaf_count() const;
  // Distinct (feature, threshold) conditions used by the internal nodes at each depth.
  std::vector<std::vector<std::pair<int, double>>> conditions_by_depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct LinearState {
  double intercept = 0.0;
  Vector coef;
};

struct KnnState {
  int k = 5;
  std::size_t n_features = 0;
  std::vector<double> rows;  // row-major training matrix
  Vector targets;
};

enum class Aggregation { sum, mean, weighted_median };

struct EnsembleState {
  double base = 0.0;
  std::vector<Tree> trees;
  std::vector<double> tree_weights;  // weighted_median only
  Aggregation aggregation = Aggregation::sum;
};

struct ConstantState {
  double value = 0.0;
};

using ModelState = std::variant<ConstantState, LinearState, KnnState, EnsembleState>;

struct FitInfo {
  int iterations = 0;
  bool converged = true;
  bool rank_deficient = false;  // OLS pseudo-inverse fallback, OMP/LARS early stop
};

class FittedModel {
 public:
  FittedModel() = default;
  FittedModel(ModelSpec spec, std::size_t n_features, ModelState state, FitInfo info)
      : spec_(std::move(spec)), n_features_(n_features), state_(std::move(state)), info_(info) {}

  Family family() const noexcept { return spec_.family; }
  const ModelSpec& spec() const noexcept { return spec_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const ModelState& state() const noexcept { return state_; }
  const FitInfo& info() const noexcept { return info_; }

  // Throws ValidationError on a column-count mismatch.
  Vector predict(const Matrix& X) const;
  // |coefficient| for linear families, normalized total split gain for trees.
  // Throws ValidationError for families without importances (KNN, dummy).
  Vector feature_importance() const;
  const LinearState& linear() const;  // throws unless the state is linear

 private:
  ModelSpec spec_;
  std::size_t n_features_ = 0;
  ModelState state_;
  FitInfo info_;
};

// Throws ValidationError for shape problems, non-finite inputs or bad
// hyperparameters; NumericalError if a solver breaks down.
FittedModel fit(const ModelSpec& spec, const Matrix& X, const Vector& y);

nlohmann::json model_to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& doc);

// --- algorithm building blocks (exposed for composition and testing) ---------

double soft_threshold(double z, double gamma);

LinearState fit_ols(const Matrix& X, const Vector& y, FitInfo* info = nullptr);
LinearState fit_ridge_closed_form(const Matrix& X, const Vector& y, double alpha);

struct CoordinateDescentOptions {
  double alpha = 1.0;
  double l1_ratio = 1.0;
  double tol = 1e-7;  // KKT residual, in units of (1/n) X^T r
  int max_sweeps = 10000;
};

struct CoordinateDescentResult {
  LinearState state;
  int sweeps = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  std::vector<double> objective;  // value after every full sweep
};

CoordinateDescentResult coordinate_descent(const Matrix& X, const Vector& y,
                                           const CoordinateDescentOptions& options);
// Objective of the elastic-net family at `state` (lasso when l1_ratio = 1).
double elastic_net_objective(const Matrix& X, const Vector& y, const LinearState& state, double alpha,
                             double l1_ratio);
// Smallest alpha at which the lasso solution is identically zero.
double lasso_alpha_max(const Matrix& X, const Vector& y);

struct OmpStep {
  int feature = -1;
  LinearState state;
  double residual_norm = 0.0;
};

struct OmpPath {
  std::vector<int> selected;
  std::vector<OmpStep> steps;
  double initial_residual_norm = 0.0;
  bool rank_deficient = false;
};

OmpPath omp_path(const Matrix& X, const Vector& y, int k_max);

enum class LarsVariant { lar, lasso };

struct LarsStep {
  double alpha = 0.0;  // max |X^T r| / n at this knot
  LinearState state;
  std::vector<int> active;
};

struct LarsPath {
  std::vector<LarsStep> steps;
  bool degenerate = false;
};

// Least-angle path. For the lasso variant the path stops at `alpha_min`
// (interpolating the last segment); `max_active` bounds the lar variant.
LarsPath least_angle(const Matrix& X, const Vector& y, LarsVariant variant, double alpha_min,
                     int max_active);

struct BayesianRidgeState {
  double noise_precision = 1.0;   // alpha
  double weight_precision = 1.0;  // lambda
  LinearState posterior_mean;
  double log_evidence = 0.0;
  int iteration = 0;
};

// Precomputed eigen-structure of the centered problem, shared by all updates.
class BayesianRidgeProblem {
 public:
  BayesianRidgeProblem(const Matrix& X, const Vector& y);
  BayesianRidgeState initial_state() const;
  // One evidence-maximization (EM) step: posterior under the current
  // precisions, then re-estimated precisions and the posterior mean under them.
  BayesianRidgeState update(const BayesianRidgeState& state) const;
  double log_evidence(double noise_precision, double weight_precision) const;

 private:
  LinearState posterior(double noise_precision, double weight_precision) const;

  std::size_t n_ = 0;
  std::size_t p_ = 0;
  Vector x_mean_;
  double y_mean_ = 0.0;
  Matrix xc_;
  Vector yc_;
  Matrix eigvecs_;
  Vector eigvals_;
  Vector xty_rotated_;  // V^T Xc^T yc
  double yty_ = 0.0;
};

BayesianRidgeState bayesian_ridge_update(const BayesianRidgeProblem& problem, const BayesianRidgeState& state);

// --- trees --------------------------------------------------------------------

struct TreeParams {
  int max_depth = 6;         // <= 0 means unlimited (depthwise / leafwise)
  int min_samples_leaf = 1;
  double max_features = 1.0;  // fraction of features considered per split
  bool random_thresholds = false;  // extra-trees splitting
  int max_leaves = 31;        // leafwise only
  int max_bins = 255;         // histogram modes only
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  friend bool operator==(const SplitCandidate&, const SplitCandidate&) = default;
};

// Best variance-reduction split over `rows` (all rows when empty). Gain is
// Var(parent) n - [Var(L) n_L + Var(R) n_R]; ties go to the lowest feature
// index, then the lowest threshold.
std::optional<SplitCandidate> cart_best_split(const Matrix& X, const Vector& y, std::span<const int> rows,
                                              int min_samples_leaf);

// Exact (presorted) tree growth, reusable across many trees on the same X.
class ExactTreeBuilder {
 public:
  explicit ExactTreeBuilder(const Matrix& X);
  // weights: one per row, 0 excludes the row. rng is required when
  // max_features < 1 or random_thresholds is set.
  Tree build(const Vector& y, std::span<const double> weights, const TreeParams& params, Rng* rng) const;

 private:
  const Matrix& x_;
  std::vector<std::vector<int>> sorted_;  // per feature, rows by ascending value
};

// Quantile-binned copy of X for histogram split finding.
class BinnedMatrix {
 public:
  BinnedMatrix(const Matrix& X, int max_bins);
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return thresholds_.size(); }
  int bins(std::size_t feature) const { return static_cast<int>(thresholds_[feature].size()) + 1; }
  std::uint16_t code(std::size_t row, std::size_t feature) const { return codes_[feature * rows_ + row]; }
  // Rows with code <= b satisfy x <= threshold(feature, b).
  double threshold(std::size_t feature, int bin) const { return thresholds_[feature][bin]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint16_t> codes_;  // column-major
  std::vector<std::vector<double>> thresholds_;
};

Tree build_leafwise_tree(const BinnedMatrix& binned, const Vector& target, const TreeParams& params);
Tree build_oblivious_tree(const BinnedMatrix& binned, const Vector& target, const TreeParams& params);

// Gradient boosting on squared loss. Keeps the binned/presorted view of X and
// the running predictions so that rounds cost one tree fit each.
class Booster {
 public:
  Booster(const Matrix& X, const Vector& y, GrowthMode mode, TreeParams params, double learning_rate);
  // Resume from an existing ensemble (its trees must have been grown on X's columns).
  Booster(const Matrix& X, const Vector& y, EnsembleState start, GrowthMode mode, TreeParams params,
          double learning_rate);
  ~Booster();
  Booster(const Booster&) = delete;
  Booster& operator=(const Booster&) = delete;

  // Fits one tree to the current residuals. Returns false (and adds nothing)
  // when no admissible split reduces the loss.
  bool round();
  const EnsembleState& ensemble() const noexcept { return ensemble_; }
  EnsembleState release() { return std::move(ensemble_); }
  double training_mse() const;

 private:
  struct Impl;
  const Matrix& x_;
  const Vector& y_;
  GrowthMode mode_;
  TreeParams params_;
  double learning_rate_;
  EnsembleState ensemble_;
  Vector prediction_;
  Impl* impl_ = nullptr;
};

EnsembleState gbm_round(const EnsembleState& ensemble, const Matrix& X, const Vector& y, double learning_rate,
                        GrowthMode mode, const TreeParams& params = {});

// AdaBoost.R2 with optional per-round sample-weight trace (each a simplex).
FittedModel fit_adaboost(const ModelSpec& spec, const Matrix& X, const Vector& y,
                         std::vector<Vector>* weight_trace);

}  // namespace riskpref::models
