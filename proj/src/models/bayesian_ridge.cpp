#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models {

namespace {

constexpr double kMinPrecision = 1e-14;
constexpr double kMaxPrecision = 1e14;

double clamp_precision(double v) { return std::clamp(v, kMinPrecision, kMaxPrecision); }

}  // namespace

BayesianRidgeProblem::BayesianRidgeProblem(const Matrix& X, const Vector& y)
    : n_(static_cast<std::size_t>(X.rows())), p_(static_cast<std::size_t>(X.cols())) {
  auto c = detail::center(X, y);
  x_mean_ = std::move(c.x_mean);
  y_mean_ = c.y_mean;
  xc_ = std::move(c.x);
  yc_ = std::move(c.y);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(xc_.transpose() * xc_);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of X^T X failed");
  eigvecs_ = eig.eigenvectors();
  eigvals_ = eig.eigenvalues().cwiseMax(0.0);
  xty_rotated_ = eigvecs_.transpose() * (xc_.transpose() * yc_);
  yty_ = yc_.squaredNorm();
}

LinearState BayesianRidgeProblem::posterior(double noise_precision, double weight_precision) const {
  Vector z(static_cast<Eigen::Index>(p_));
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z[i] = noise_precision * xty_rotated_[i] / (weight_precision + noise_precision * eigvals_[i]);
  }
  LinearState s;
  s.coef = eigvecs_ * z;
  s.intercept = y_mean_ - x_mean_.dot(s.coef);
  return s;
}

double BayesianRidgeProblem::log_evidence(double noise_precision, double weight_precision) const {
  const double a = noise_precision;
  const double l = weight_precision;
  double rss = yty_;
  double mtm = 0.0;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < eigvals_.size(); ++i) {
    const double z = a * xty_rotated_[i] / (l + a * eigvals_[i]);
    rss += -2.0 * z * xty_rotated_[i] + eigvals_[i] * z * z;
    mtm += z * z;
    log_det += std::log(l + a * eigvals_[i]);
  }
  rss = std::max(rss, 0.0);
  const auto n = static_cast<double>(n_);
  const auto p = static_cast<double>(p_);
  return 0.5 * p * std::log(l) + 0.5 * n * std::log(a) - 0.5 * a * rss - 0.5 * l * mtm - 0.5 * log_det -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

BayesianRidgeState BayesianRidgeProblem::initial_state() const {
  BayesianRidgeState s;
  const double var = n_ > 0 ? yty_ / static_cast<double>(n_) : 0.0;
  s.noise_precision = clamp_precision(1.0 / (var + 1e-12));
  s.weight_precision = 1.0;
  s.posterior_mean = posterior(s.noise_precision, s.weight_precision);
  s.log_evidence = log_evidence(s.noise_precision, s.weight_precision);
  return s;
}

BayesianRidgeState BayesianRidgeProblem::update(const BayesianRidgeState& state) const {
  const double a = state.noise_precision;
  const double l = state.weight_precision;
  double rss = yty_;
  double mtm = 0.0;
  double trace_s = 0.0;
  double trace_xtxs = 0.0;
  for (Eigen::Index i = 0; i < eigvals_.size(); ++i) {
    const double denom = l + a * eigvals_[i];
    const double z = a * xty_rotated_[i] / denom;
    rss += -2.0 * z * xty_rotated_[i] + eigvals_[i] * z * z;
    mtm += z * z;
    trace_s += 1.0 / denom;
    trace_xtxs += eigvals_[i] / denom;
  }
  rss = std::max(rss, 0.0);
  BayesianRidgeState next;
  next.iteration = state.iteration + 1;
  next.noise_precision = clamp_precision(static_cast<double>(n_) / (rss + trace_xtxs));
  next.weight_precision = p_ > 0 ? clamp_precision(static_cast<double>(p_) / (mtm + trace_s)) : l;
  if (!std::isfinite(next.noise_precision) || !std::isfinite(next.weight_precision)) {
    throw NumericalError("bayesian ridge update diverged at iteration " + std::to_string(next.iteration));
  }
  next.posterior_mean = posterior(next.noise_precision, next.weight_precision);
  next.log_evidence = log_evidence(next.noise_precision, next.weight_precision);
  if (!std::isfinite(next.log_evidence) || !next.posterior_mean.coef.allFinite()) {
    throw NumericalError("bayesian ridge posterior is not finite at iteration " + std::to_string(next.iteration));
  }
  return next;
}

BayesianRidgeState bayesian_ridge_update(const BayesianRidgeProblem& problem, const BayesianRidgeState& state) {
  return problem.update(state);
}

namespace detail {

LinearState fit_bayesian_ridge(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info) {
  const int max_iter = as_int(spec.param("max_iter"));
  const double tol = spec.param("tol");
  const BayesianRidgeProblem problem(X, y);
  BayesianRidgeState s = problem.initial_state();
  info.converged = false;
  for (int it = 0; it < max_iter; ++it) {
    BayesianRidgeState next = problem.update(s);
    const double change = std::max(std::abs(std::log(next.noise_precision / s.noise_precision)),
                                   std::abs(std::log(next.weight_precision / s.weight_precision)));
    s = std::move(next);
    info.iterations = s.iteration;
    if (change <= tol) {
      info.converged = true;
      break;
    }
  }
  return s.posterior_mean;
}

}  // namespace detail

}  // namespace riskpref::models
