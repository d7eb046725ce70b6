#pragma once

#include "riskpref/models.hpp"

namespace riskpref::models::detail {

struct Centered {
  Matrix x;
  Vector y;
  Vector x_mean;
  double y_mean = 0.0;
};

Centered center(const Matrix& X, const Vector& y);
// intercept = y_mean - x_mean . coef
LinearState uncenter(const Centered& c, Vector coef);

int as_int(double v);

LinearState fit_huber(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info);
LinearState fit_passive_aggressive(const ModelSpec& spec, const Matrix& X, const Vector& y);
LinearState fit_omp(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info);
LinearState fit_lasso_lars(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info);
LinearState fit_bayesian_ridge(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info);

KnnState fit_knn(const ModelSpec& spec, const Matrix& X, const Vector& y);
Vector predict_knn(const KnnState& state, const Matrix& X);

EnsembleState fit_decision_tree(const ModelSpec& spec, const Matrix& X, const Vector& y);
EnsembleState fit_forest(const ModelSpec& spec, const Matrix& X, const Vector& y, bool extra);
EnsembleState fit_boosting(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info);
EnsembleState fit_adaboost_state(const ModelSpec& spec, const Matrix& X, const Vector& y,
                                 std::vector<Vector>* weight_trace);
Vector predict_ensemble(const EnsembleState& state, const Matrix& X);

}  // namespace riskpref::models::detail
