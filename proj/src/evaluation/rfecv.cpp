#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"

namespace riskpref::evaluation {

RfecvResult rfecv(const models::ModelSpec& spec, const Matrix& X, const Vector& y, const CvOptions& options) {
  if (!models::has_importance(spec.family)) {
    throw ValidationError("family '" + std::string(models::family_key(spec.family)) +
                              "' exposes no feature importance; RFECV needs coefficients or split gains",
                          "family");
  }
  models::validate(spec);
  const auto p = static_cast<std::size_t>(X.cols());
  if (p == 0) throw ValidationError("RFECV needs at least one feature", "X");
  const auto folds = preprocess::kfold_indices(static_cast<std::size_t>(X.rows()), options.folds, options.seed);

  RfecvResult result;
  result.metric = options.metric;
  std::vector<std::size_t> current(p);
  std::iota(current.begin(), current.end(), 0);
  while (!current.empty()) {
    const std::vector<Eigen::Index> cols(current.begin(), current.end());
    const Matrix xs = X(Eigen::all, cols);
    RfecvStep step;
    step.features = current;
    step.fold_scores.assign(folds.size(), 0.0);
    detail::parallel_for(folds.size(), options.threads, [&](std::size_t f) {
      step.fold_scores[f] = cross_val_scores(spec, xs, y, {folds[f]}, options.metric).front();
    });
    step.mean_score =
        std::accumulate(step.fold_scores.begin(), step.fold_scores.end(), 0.0) / static_cast<double>(folds.size());
    result.steps.push_back(std::move(step));
    if (current.size() == 1) break;

    const Vector imp = models::fit(spec, xs, y).feature_importance();
    std::size_t drop = 0;
    for (std::size_t i = 1; i < current.size(); ++i) {
      if (imp[static_cast<Eigen::Index>(i)] < imp[static_cast<Eigen::Index>(drop)]) drop = i;
    }
    result.elimination_order.push_back(current[drop]);
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(drop));
  }

  // best CV score; on ties the smaller feature set wins
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.steps.size(); ++i) {
    const double m = result.steps[i].mean_score;
    const double l = options.metric == MetricKind::r2 ? -m : m;
    if (l <= best) {
      best = l;
      result.best_step = i;
    }
  }
  result.selected = result.steps[result.best_step].features;
  return result;
}

}  // namespace riskpref::evaluation
