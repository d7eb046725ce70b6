#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models::detail {

namespace {

TreeParams tree_params(const ModelSpec& spec) {
  TreeParams p;
  p.max_depth = as_int(spec.param("max_depth"));
  if (spec.family != Family::adaboost) p.min_samples_leaf = as_int(spec.param("min_samples_leaf"));
  return p;
}

double weighted_median(std::vector<std::pair<double, double>>& pred_weight, double total) {
  std::sort(pred_weight.begin(), pred_weight.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double acc = 0.0;
  for (const auto& [pred, w] : pred_weight) {
    acc += w;
    if (acc >= 0.5 * total) return pred;
  }
  return pred_weight.back().first;
}

}  // namespace

EnsembleState fit_decision_tree(const ModelSpec& spec, const Matrix& X, const Vector& y) {
  const ExactTreeBuilder builder(X);
  EnsembleState s;
  s.aggregation = Aggregation::mean;
  s.trees.push_back(builder.build(y, {}, tree_params(spec), nullptr));
  return s;
}

EnsembleState fit_forest(const ModelSpec& spec, const Matrix& X, const Vector& y, bool extra) {
  TreeParams params = tree_params(spec);
  params.max_features = spec.param("max_features");
  params.random_thresholds = extra;
  const bool bootstrap = !extra && spec.param("bootstrap") != 0.0;
  const int n_trees = as_int(spec.param("n_estimators"));
  const auto n = static_cast<std::size_t>(X.rows());
  const ExactTreeBuilder builder(X);

  EnsembleState s;
  s.aggregation = Aggregation::mean;
  std::vector<double> weights;
  for (int t = 0; t < n_trees; ++t) {
    Rng rng = make_rng(spec.seed, streams::kTree, static_cast<std::uint64_t>(t));
    if (bootstrap) {
      weights.assign(n, 0.0);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t i = 0; i < n; ++i) weights[pick(rng)] += 1.0;
    }
    s.trees.push_back(builder.build(y, weights, params, &rng));
  }
  if (s.trees.empty()) s.base = y.mean();
  return s;
}

EnsembleState fit_adaboost_state(const ModelSpec& spec, const Matrix& X, const Vector& y,
                                 std::vector<Vector>* weight_trace) {
  const TreeParams params = tree_params(spec);
  const double lr = spec.param("learning_rate");
  const int rounds = as_int(spec.param("n_estimators"));
  const auto n = static_cast<std::size_t>(X.rows());
  const ExactTreeBuilder builder(X);

  EnsembleState s;
  s.aggregation = Aggregation::weighted_median;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (int t = 0; t < rounds; ++t) {
    Tree tree = builder.build(y, w, params, nullptr);
    const Vector pred = tree.predict(X);
    const Vector err = (y - pred).cwiseAbs();
    const double max_err = err.maxCoeff();
    if (max_err <= 0.0) {
      s.trees.push_back(std::move(tree));
      s.tree_weights.push_back(1.0);
      break;
    }
    double avg_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) avg_loss += w[i] * err[static_cast<Eigen::Index>(i)] / max_err;
    if (avg_loss >= 0.5) {
      if (s.trees.empty()) {
        s.trees.push_back(std::move(tree));
        s.tree_weights.push_back(1.0);
      }
      break;
    }
    const double beta = avg_loss / (1.0 - avg_loss);
    s.trees.push_back(std::move(tree));
    s.tree_weights.push_back(lr * std::log(1.0 / beta));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double loss = err[static_cast<Eigen::Index>(i)] / max_err;
      w[i] *= std::pow(beta, (1.0 - loss) * lr);
      total += w[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) break;
    for (auto& v : w) v /= total;
    if (weight_trace) weight_trace->emplace_back(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(n)));
  }
  if (s.trees.empty()) s.base = y.mean();
  return s;
}

Vector predict_ensemble(const EnsembleState& state, const Matrix& X) {
  const auto n = X.rows();
  if (state.trees.empty()) return Vector::Constant(n, state.base);
  switch (state.aggregation) {
    case Aggregation::sum:
    case Aggregation::mean: {
      Vector out = Vector::Zero(n);
      for (const auto& t : state.trees) out += t.predict(X);
      if (state.aggregation == Aggregation::mean) out /= static_cast<double>(state.trees.size());
      out.array() += state.base;
      return out;
    }
    case Aggregation::weighted_median: {
      Matrix preds(n, static_cast<Eigen::Index>(state.trees.size()));
      for (std::size_t t = 0; t < state.trees.size(); ++t) {
        preds.col(static_cast<Eigen::Index>(t)) = state.trees[t].predict(X);
      }
      const double total = std::accumulate(state.tree_weights.begin(), state.tree_weights.end(), 0.0);
      Vector out(n);
      std::vector<std::pair<double, double>> pw(state.trees.size());
      for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t t = 0; t < state.trees.size(); ++t) {
          pw[t] = {preds(r, static_cast<Eigen::Index>(t)), state.tree_weights[t]};
        }
        out[r] = weighted_median(pw, total);
      }
      return out;
    }
  }
  return Vector::Constant(n, state.base);
}

}  // namespace riskpref::models::detail
