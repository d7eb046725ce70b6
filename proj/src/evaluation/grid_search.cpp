#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"

namespace riskpref::evaluation {

namespace {

std::vector<Eigen::Index> complement(std::size_t n, const std::vector<std::size_t>& fold) {
  std::vector<char> held(n, 0);
  for (const auto i : fold) held[i] = 1;
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!held[i]) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

double fold_score(const models::ModelSpec& spec, const Matrix& X, const Vector& y,
                  const std::vector<std::size_t>& fold, MetricKind metric) {
  const auto train = complement(static_cast<std::size_t>(X.rows()), fold);
  const std::vector<Eigen::Index> val(fold.begin(), fold.end());
  const Matrix x_train = X(train, Eigen::all);
  const Vector y_train = y(train);
  const auto model = models::fit(spec, x_train, y_train);
  const Vector pred = model.predict(X(val, Eigen::all));
  const Vector y_val = y(val);
  return score({y_val.data(), static_cast<std::size_t>(y_val.size())},
               {pred.data(), static_cast<std::size_t>(pred.size())}, metric);
}

double mean_loss(const std::vector<double>& scores, MetricKind metric) {
  const double m = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  return metric == MetricKind::r2 ? -m : m;
}

}  // namespace

std::vector<double> cross_val_scores(const models::ModelSpec& spec, const Matrix& X, const Vector& y,
                                     const std::vector<std::vector<std::size_t>>& folds, MetricKind metric) {
  std::vector<double> out;
  out.reserve(folds.size());
  for (const auto& fold : folds) out.push_back(fold_score(spec, X, y, fold, metric));
  return out;
}

GridSearchResult grid_search_cv(std::span<const models::ModelSpec> grid, const Matrix& X, const Vector& y,
                                const CvOptions& options) {
  if (grid.empty()) throw ValidationError("grid must contain at least one spec", "grid");
  for (const auto& spec : grid) models::validate(spec);
  const auto folds = preprocess::kfold_indices(static_cast<std::size_t>(X.rows()), options.folds, options.seed);
  const std::size_t k = folds.size();

  GridSearchResult result;
  result.table.resize(grid.size());
  std::vector<double> scores(grid.size() * k, 0.0);
  std::vector<std::string> errors(grid.size() * k);
  detail::parallel_for(grid.size() * k, options.threads, [&](std::size_t job) {
    const std::size_t s = job / k;
    const std::size_t f = job % k;
    try {
      scores[job] = fold_score(grid[s], X, y, folds[f], options.metric);
    } catch (const std::exception& e) {
      errors[job] = e.what();
    }
  });

  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    auto& row = result.table[s];
    row.spec = grid[s];
    for (std::size_t f = 0; f < k; ++f) {
      if (!errors[s * k + f].empty() && !row.failed) {
        row.failed = true;
        row.error = "fold " + std::to_string(f) + ": " + errors[s * k + f];
      }
      row.fold_scores.push_back(scores[s * k + f]);
    }
    if (row.failed) continue;
    row.mean_score = std::accumulate(row.fold_scores.begin(), row.fold_scores.end(), 0.0) / static_cast<double>(k);
    const double l = mean_loss(row.fold_scores, options.metric);
    if (!std::isfinite(l)) {
      row.failed = true;
      row.error = "non-finite validation score";
      continue;
    }
    if (!any || l < best) {
      best = l;
      result.best_index = s;
      any = true;
    }
  }
  if (!any) throw Error("every spec in the grid failed: " + result.table.front().error);
  result.best = grid[result.best_index];
  result.refit = models::fit(result.best, X, y);
  return result;
}

}  // namespace riskpref::evaluation
