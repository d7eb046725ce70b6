#include <cmath>
#include <optional>

#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models {

struct Booster::Impl {
  std::optional<ExactTreeBuilder> exact;
  std::optional<BinnedMatrix> binned;
};

Booster::Booster(const Matrix& X, const Vector& y, GrowthMode mode, TreeParams params, double learning_rate)
    : Booster(X, y,
              EnsembleState{y.size() > 0 ? y.mean() : 0.0, {}, {}, Aggregation::sum},
              mode, params, learning_rate) {}

Booster::Booster(const Matrix& X, const Vector& y, EnsembleState start, GrowthMode mode, TreeParams params,
                 double learning_rate)
    : x_(X), y_(y), mode_(mode), params_(params), learning_rate_(learning_rate), ensemble_(std::move(start)) {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("learning_rate must lie in (0, 1]", "learning_rate");
  }
  if (X.rows() != y.size()) throw ValidationError("X and y row counts differ", "y");
  ensemble_.aggregation = Aggregation::sum;
  prediction_ = detail::predict_ensemble(ensemble_, X);
  impl_ = new Impl;
  if (mode == GrowthMode::depthwise) {
    impl_->exact.emplace(X);
  } else {
    impl_->binned.emplace(X, params.max_bins);
  }
}

Booster::~Booster() { delete impl_; }

bool Booster::round() {
  const Vector residual = y_ - prediction_;
  if (residual.size() == 0 || residual.cwiseAbs().maxCoeff() == 0.0) return false;
  Tree tree;
  switch (mode_) {
    case GrowthMode::depthwise:
      tree = impl_->exact->build(residual, {}, params_, nullptr);
      break;
    case GrowthMode::leafwise:
      tree = build_leafwise_tree(*impl_->binned, residual, params_);
      break;
    case GrowthMode::oblivious:
      tree = build_oblivious_tree(*impl_->binned, residual, params_);
      break;
  }
  if (tree.nodes.size() == 1 && tree.nodes[0].value == 0.0) return false;
  for (auto& nd : tree.nodes) {
    if (nd.feature < 0) nd.value *= learning_rate_;
  }
  prediction_ += tree.predict(x_);
  ensemble_.trees.push_back(std::move(tree));
  return true;
}

double Booster::training_mse() const {
  if (y_.size() == 0) return 0.0;
  return (y_ - prediction_).squaredNorm() / static_cast<double>(y_.size());
}

EnsembleState gbm_round(const EnsembleState& ensemble, const Matrix& X, const Vector& y, double learning_rate,
                        GrowthMode mode, const TreeParams& params) {
  Booster booster(X, y, ensemble, mode, params, learning_rate);
  booster.round();
  return booster.release();
}

namespace detail {

EnsembleState fit_boosting(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info) {
  TreeParams params;
  GrowthMode mode = GrowthMode::depthwise;
  switch (spec.family) {
    case Family::gradient_boosting:
      params.max_depth = as_int(spec.param("max_depth"));
      params.min_samples_leaf = as_int(spec.param("min_samples_leaf"));
      break;
    case Family::lightgbm:
      mode = GrowthMode::leafwise;
      params.max_leaves = as_int(spec.param("num_leaves"));
      params.max_depth = as_int(spec.param("max_depth"));
      params.min_samples_leaf = as_int(spec.param("min_samples_leaf"));
      params.max_bins = as_int(spec.param("max_bins"));
      break;
    case Family::catboost:
      mode = GrowthMode::oblivious;
      params.max_depth = as_int(spec.param("depth"));
      params.max_bins = as_int(spec.param("max_bins"));
      break;
    default:
      throw Error("not a boosting family");
  }
  Booster booster(X, y, mode, params, spec.param("learning_rate"));
  const int rounds = as_int(spec.param("n_estimators"));
  info.iterations = 0;
  for (int i = 0; i < rounds; ++i) {
    if (!booster.round()) break;
    ++info.iterations;
  }
  return booster.release();
}

}  // namespace detail

}  // namespace riskpref::models
