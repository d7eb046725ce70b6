#include <cmath>

#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Vector FittedModel::predict(const Matrix& X) const {
  if (static_cast<std::size_t>(X.cols()) != n_features_) {
    throw ValidationError("expected " + std::to_string(n_features_) + " feature columns, got " +
                              std::to_string(X.cols()),
                          "X");
  }
  return std::visit(overloaded{
                        [&](const ConstantState& s) -> Vector { return Vector::Constant(X.rows(), s.value); },
                        [&](const LinearState& s) -> Vector {
                          return ((X * s.coef).array() + s.intercept).matrix();
                        },
                        [&](const KnnState& s) -> Vector { return detail::predict_knn(s, X); },
                        [&](const EnsembleState& s) -> Vector { return detail::predict_ensemble(s, X); },
                    },
                    state_);
}

Vector FittedModel::feature_importance() const {
  if (const auto* lin = std::get_if<LinearState>(&state_)) return lin->coef.cwiseAbs();
  if (const auto* ens = std::get_if<EnsembleState>(&state_)) {
    Vector imp = Vector::Zero(static_cast<Eigen::Index>(n_features_));
    for (const auto& t : ens->trees) {
      for (const auto& nd : t.nodes) {
        if (nd.feature >= 0) imp[nd.feature] += nd.gain;
      }
    }
    const double total = imp.sum();
    if (total > 0) imp /= total;
    return imp;
  }
  throw ValidationError("family '" + std::string(family_key(spec_.family)) + "' has no feature importances",
                        "family");
}

const LinearState& FittedModel::linear() const {
  if (const auto* lin = std::get_if<LinearState>(&state_)) return *lin;
  throw ValidationError("family '" + std::string(family_key(spec_.family)) + "' is not a linear model", "family");
}

FittedModel fit(const ModelSpec& spec, const Matrix& X, const Vector& y) {
  validate(spec);
  if (X.rows() < 1) throw ValidationError("need at least one training row", "X");
  if (X.rows() != y.size()) throw ValidationError("X has " + std::to_string(X.rows()) + " rows but y has " +
                                                      std::to_string(y.size()),
                                                  "y");
  if (!X.allFinite()) throw ValidationError("X contains non-finite values", "X");
  if (!y.allFinite()) throw ValidationError("y contains non-finite values", "y");

  FitInfo info;
  ModelState state;
  switch (spec.family) {
    case Family::dummy:
      state = ConstantState{y.mean()};
      break;
    case Family::linear_regression:
      state = fit_ols(X, y, &info);
      break;
    case Family::ridge:
      state = fit_ridge_closed_form(X, y, spec.param("alpha"));
      break;
    case Family::lasso:
    case Family::elastic_net: {
      CoordinateDescentOptions opt;
      opt.alpha = spec.param("alpha");
      opt.l1_ratio = spec.family == Family::lasso ? 1.0 : spec.param("l1_ratio");
      opt.tol = spec.param("tol");
      opt.max_sweeps = detail::as_int(spec.param("max_iter"));
      auto res = coordinate_descent(X, y, opt);
      info.iterations = res.sweeps;
      info.converged = res.converged;
      state = std::move(res.state);
      break;
    }
    case Family::lasso_lars:
      state = detail::fit_lasso_lars(spec, X, y, info);
      break;
    case Family::omp:
      state = detail::fit_omp(spec, X, y, info);
      break;
    case Family::bayesian_ridge:
      state = detail::fit_bayesian_ridge(spec, X, y, info);
      break;
    case Family::huber:
      state = detail::fit_huber(spec, X, y, info);
      break;
    case Family::passive_aggressive:
      state = detail::fit_passive_aggressive(spec, X, y);
      info.iterations = 1;
      break;
    case Family::knn:
      state = detail::fit_knn(spec, X, y);
      break;
    case Family::decision_tree:
      state = detail::fit_decision_tree(spec, X, y);
      break;
    case Family::random_forest:
      state = detail::fit_forest(spec, X, y, false);
      break;
    case Family::extra_trees:
      state = detail::fit_forest(spec, X, y, true);
      break;
    case Family::adaboost:
      state = detail::fit_adaboost_state(spec, X, y, nullptr);
      break;
    case Family::gradient_boosting:
    case Family::lightgbm:
    case Family::catboost:
      state = detail::fit_boosting(spec, X, y, info);
      break;
  }
  if (const auto* lin = std::get_if<LinearState>(&state)) {
    if (!lin->coef.allFinite() || !std::isfinite(lin->intercept)) {
      throw NumericalError(std::string(family_key(spec.family)) + " produced non-finite coefficients");
    }
  }
  return FittedModel(spec, static_cast<std::size_t>(X.cols()), std::move(state), info);
}

FittedModel fit_adaboost(const ModelSpec& spec, const Matrix& X, const Vector& y,
                         std::vector<Vector>* weight_trace) {
  if (spec.family != Family::adaboost) throw ValidationError("spec is not an adaboost spec", "family");
  validate(spec);
  if (X.rows() < 1 || X.rows() != y.size()) throw ValidationError("X and y shapes do not match", "y");
  return FittedModel(spec, static_cast<std::size_t>(X.cols()),
                     detail::fit_adaboost_state(spec, X, y, weight_trace), FitInfo{});
}

}  // namespace riskpref::models
