#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "riskpref/error.hpp"
#include "riskpref/kernels.hpp"

namespace riskpref::models {

namespace detail {

Centered center(const Matrix& X, const Vector& y) {
  Centered c;
  const auto n = static_cast<double>(X.rows());
  c.x_mean = X.colwise().sum().transpose() / n;
  c.y_mean = y.sum() / n;
  c.x = X.rowwise() - c.x_mean.transpose();
  c.y = y.array() - c.y_mean;
  return c;
}

LinearState uncenter(const Centered& c, Vector coef) {
  LinearState s;
  s.intercept = c.y_mean - c.x_mean.dot(coef);
  s.coef = std::move(coef);
  return s;
}

int as_int(double v) { return static_cast<int>(std::lround(v)); }

namespace {

std::span<const double> col(const Matrix& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// Minimizes sum_i w_i (y_i - b - x_i beta)^2 + alpha ||beta||^2.
LinearState weighted_ridge(const Matrix& X, const Vector& y, const Vector& w, double alpha) {
  const double wsum = w.sum();
  const Vector x_mean = (X.transpose() * w) / wsum;
  const double y_mean = w.dot(y) / wsum;
  const Vector sw = w.array().sqrt();
  const Matrix xc = (X.rowwise() - x_mean.transpose()).array().colwise() * sw.array();
  const Vector yc = (y.array() - y_mean) * sw.array();
  Matrix a = xc.transpose() * xc;
  a.diagonal().array() += alpha;
  Vector coef;
  Eigen::LDLT<Matrix> ldlt(a);
  if (alpha > 0 && ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    coef = ldlt.solve(xc.transpose() * yc);
  } else {
    coef = xc.completeOrthogonalDecomposition().solve(yc);
  }
  LinearState s;
  s.intercept = y_mean - x_mean.dot(coef);
  s.coef = std::move(coef);
  return s;
}

}  // namespace

LinearState fit_huber(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info) {
  const double epsilon = spec.param("epsilon");
  const double alpha = spec.param("alpha");
  const int max_iter = as_int(spec.param("max_iter"));
  const double tol = spec.param("tol");
  const auto n = X.rows();

  Vector w = Vector::Ones(n);
  LinearState s = weighted_ridge(X, y, w, alpha);
  Vector r = y - (X * s.coef).array().matrix() - Vector::Constant(n, s.intercept);
  std::vector<double> abs_dev(static_cast<std::size_t>(n));
  const double med = median(std::vector<double>(r.data(), r.data() + n));
  for (Eigen::Index i = 0; i < n; ++i) abs_dev[static_cast<std::size_t>(i)] = std::abs(r[i] - med);
  const double sigma = 1.4826 * median(abs_dev);
  if (!(sigma > 1e-12 * (1.0 + y.cwiseAbs().maxCoeff()))) {
    info.iterations = 0;
    return s;
  }
  const double delta = epsilon * sigma;
  info.converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(r[i]);
      w[i] = a <= delta ? 1.0 : delta / a;
    }
    LinearState next = weighted_ridge(X, y, w, alpha);
    const double scale = 1.0 + std::max(next.coef.cwiseAbs().maxCoeff(), std::abs(next.intercept));
    const double change =
        std::max((next.coef - s.coef).cwiseAbs().maxCoeff(), std::abs(next.intercept - s.intercept));
    s = std::move(next);
    r = y - X * s.coef - Vector::Constant(n, s.intercept);
    info.iterations = it;
    if (change <= tol * scale) {
      info.converged = true;
      break;
    }
  }
  return s;
}

LinearState fit_passive_aggressive(const ModelSpec& spec, const Matrix& X, const Vector& y) {
  const double c = spec.param("C");
  const double epsilon = spec.param("epsilon");
  LinearState s;
  s.coef = Vector::Zero(X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    const double pred = row.dot(s.coef) + s.intercept;
    const double err = y[i] - pred;
    const double loss = std::abs(err) - epsilon;
    if (loss <= 0.0) continue;
    const double tau = std::min(c, loss / (row.squaredNorm() + 1.0));
    const double step = err > 0 ? tau : -tau;
    s.coef += step * row.transpose();
    s.intercept += step;
  }
  return s;
}

LinearState fit_omp(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info) {
  const auto p = static_cast<int>(X.cols());
  int k = as_int(spec.param("n_nonzero_coefs"));
  if (k == 0) k = std::max(1, static_cast<int>(0.1 * p));
  k = std::min(k, p);
  const OmpPath path = omp_path(X, y, k);
  info.rank_deficient = path.rank_deficient;
  info.iterations = static_cast<int>(path.steps.size());
  if (path.steps.empty()) {
    LinearState s;
    s.coef = Vector::Zero(p);
    s.intercept = y.mean();
    return s;
  }
  return path.steps.back().state;
}

}  // namespace detail

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

LinearState fit_ols(const Matrix& X, const Vector& y, FitInfo* info) {
  const auto c = detail::center(X, y);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(c.x);
  Vector coef = cod.solve(c.y);
  if (info) info->rank_deficient = cod.rank() < X.cols();
  return detail::uncenter(c, std::move(coef));
}

LinearState fit_ridge_closed_form(const Matrix& X, const Vector& y, double alpha) {
  if (alpha == 0.0) return fit_ols(X, y);
  const auto c = detail::center(X, y);
  Matrix a = c.x.transpose() * c.x;
  a.diagonal().array() += alpha;
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw NumericalError("ridge normal equations could not be factorized");
  return detail::uncenter(c, ldlt.solve(c.x.transpose() * c.y));
}

CoordinateDescentResult coordinate_descent(const Matrix& X, const Vector& y,
                                           const CoordinateDescentOptions& options) {
  const auto c = detail::center(X, y);
  const auto n = static_cast<double>(X.rows());
  const auto p = X.cols();
  const double l1 = options.alpha * options.l1_ratio;
  const double l2 = options.alpha * (1.0 - options.l1_ratio);

  Vector col_sq(p);
  for (Eigen::Index j = 0; j < p; ++j) col_sq[j] = kernels::dot(detail::col(c.x, j), detail::col(c.x, j)) / n;

  Vector beta = Vector::Zero(p);
  Vector r = c.y;
  std::span<double> r_span(r.data(), static_cast<std::size_t>(r.size()));

  CoordinateDescentResult result;
  auto objective = [&] {
    return 0.5 * r.squaredNorm() / n + l1 * beta.lpNorm<1>() + 0.5 * l2 * beta.squaredNorm();
  };
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double old = beta[j];
      const double rho = kernels::dot(detail::col(c.x, j), r_span) / n + col_sq[j] * old;
      const double next = soft_threshold(rho, l1) / (col_sq[j] + l2);
      if (next != old) {
        kernels::axpy(old - next, detail::col(c.x, j), r_span);
        beta[j] = next;
      }
    }
    result.sweeps = sweep;
    result.objective.push_back(objective());

    double kkt = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double g = kernels::dot(detail::col(c.x, j), r_span) / n - l2 * beta[j];
      const double v = beta[j] != 0.0 ? std::abs(g - l1 * (beta[j] > 0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::abs(g) - l1);
      kkt = std::max(kkt, v);
    }
    result.kkt_residual = kkt;
    if (kkt <= options.tol) {
      result.converged = true;
      break;
    }
  }
  result.state = detail::uncenter(c, std::move(beta));
  return result;
}

double elastic_net_objective(const Matrix& X, const Vector& y, const LinearState& state, double alpha,
                             double l1_ratio) {
  const auto n = static_cast<double>(X.rows());
  const Vector r = y - X * state.coef - Vector::Constant(X.rows(), state.intercept);
  return 0.5 * r.squaredNorm() / n + alpha * l1_ratio * state.coef.lpNorm<1>() +
         0.5 * alpha * (1.0 - l1_ratio) * state.coef.squaredNorm();
}

double lasso_alpha_max(const Matrix& X, const Vector& y) {
  const auto c = detail::center(X, y);
  if (X.cols() == 0) return 0.0;
  return (c.x.transpose() * c.y).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

OmpPath omp_path(const Matrix& X, const Vector& y, int k_max) {
  const auto p = static_cast<int>(X.cols());
  if (k_max < 1 || k_max > p) throw ValidationError("k_max must lie in [1, p]", "k_max");
  const auto c = detail::center(X, y);
  Vector col_norm(p);
  for (int j = 0; j < p; ++j) col_norm[j] = c.x.col(j).norm();

  OmpPath path;
  Vector r = c.y;
  path.initial_residual_norm = r.norm();
  const double y_norm = path.initial_residual_norm;
  std::vector<char> used(static_cast<std::size_t>(p), 0);
  for (int t = 0; t < k_max; ++t) {
    if (r.norm() <= 1e-12 * (y_norm + std::numeric_limits<double>::min())) break;
    int best = -1;
    double best_corr = 0.0;
    const Vector xtr = c.x.transpose() * r;
    for (int j = 0; j < p; ++j) {
      if (used[static_cast<std::size_t>(j)] || col_norm[j] == 0.0) continue;
      const double corr = std::abs(xtr[j]) / col_norm[j];
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    if (best < 0 || best_corr <= 1e-10 * y_norm) break;

    std::vector<int> active = path.selected;
    active.push_back(best);
    Matrix xa(X.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) xa.col(static_cast<Eigen::Index>(a)) = c.x.col(active[a]);
    Eigen::ColPivHouseholderQR<Matrix> qr(xa);
    if (qr.rank() < xa.cols()) {
      path.rank_deficient = true;
      break;
    }
    const Vector beta_a = qr.solve(c.y);
    used[static_cast<std::size_t>(best)] = 1;
    path.selected = active;
    r = c.y - xa * beta_a;

    Vector coef = Vector::Zero(p);
    for (std::size_t a = 0; a < active.size(); ++a) coef[active[a]] = beta_a[static_cast<Eigen::Index>(a)];
    path.steps.push_back({best, detail::uncenter(c, std::move(coef)), r.norm()});
  }
  return path;
}

}  // namespace riskpref::models
