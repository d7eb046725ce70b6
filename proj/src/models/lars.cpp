#include <cmath>
#include <limits>

#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models {

namespace {

constexpr double kTiny = 1e-12;

}  // namespace

LarsPath least_angle(const Matrix& X, const Vector& y, LarsVariant variant, double alpha_min, int max_active) {
  if (alpha_min < 0) throw ValidationError("alpha_min must be >= 0", "alpha");
  const auto c = detail::center(X, y);
  const auto n = static_cast<double>(X.rows());
  const auto p = static_cast<int>(X.cols());
  max_active = std::min(max_active, p);

  LarsPath path;
  Vector beta = Vector::Zero(p);
  Vector r = c.y;
  Vector corr = c.x.transpose() * r;
  std::vector<int> active;
  std::vector<double> sign;
  std::vector<char> in_active(static_cast<std::size_t>(p), 0);

  auto record = [&](double big_c) {
    LarsStep step;
    step.alpha = big_c / n;
    step.state = detail::uncenter(c, beta);
    step.active = active;
    path.steps.push_back(std::move(step));
  };

  auto argmax_inactive = [&](int skip) {
    int best = -1;
    double best_v = 0.0;
    for (int j = 0; j < p; ++j) {
      if (in_active[static_cast<std::size_t>(j)] || j == skip) continue;
      if (std::abs(corr[j]) > best_v) {
        best_v = std::abs(corr[j]);
        best = j;
      }
    }
    return best;
  };

  double big_c = p > 0 ? corr.cwiseAbs().maxCoeff() : 0.0;
  const double c0 = big_c;
  record(big_c);
  if (p == 0 || big_c <= kTiny || big_c / n <= alpha_min || max_active == 0) return path;

  int enter = argmax_inactive(-1);
  int dropped = -1;
  while (true) {
    if (enter >= 0) {
      active.push_back(enter);
      sign.push_back(corr[enter] >= 0 ? 1.0 : -1.0);
      in_active[static_cast<std::size_t>(enter)] = 1;
    }
    const auto k = static_cast<Eigen::Index>(active.size());
    Matrix xa(X.rows(), k);
    for (Eigen::Index a = 0; a < k; ++a) xa.col(a) = sign[static_cast<std::size_t>(a)] * c.x.col(active[a]);
    const Matrix gram = xa.transpose() * xa;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      path.degenerate = true;
      break;
    }
    Vector w = llt.solve(Vector::Ones(k));
    const double ones_w = w.sum();
    if (!(ones_w > 0) || !std::isfinite(ones_w)) {
      path.degenerate = true;
      break;
    }
    const double big_a = 1.0 / std::sqrt(ones_w);
    w *= big_a;
    const Vector u = xa * w;
    const Vector a_vec = c.x.transpose() * u;

    double gamma = big_c / big_a;  // step that drives all correlations to zero
    int next_enter = -1;
    const bool room = static_cast<int>(active.size()) < max_active;
    if (!room && variant == LarsVariant::lar) break;
    if (room) {
      for (int j = 0; j < p; ++j) {
        if (in_active[static_cast<std::size_t>(j)] || j == dropped) continue;
        for (const double g : {(big_c - corr[j]) / (big_a - a_vec[j]), (big_c + corr[j]) / (big_a + a_vec[j])}) {
          if (std::isfinite(g) && g > kTiny && g < gamma) {
            gamma = g;
            next_enter = j;
          }
        }
      }
    }
    int drop_pos = -1;
    if (variant == LarsVariant::lasso) {
      for (Eigen::Index a = 0; a < k; ++a) {
        const double d = sign[static_cast<std::size_t>(a)] * w[a];
        const double g = -beta[active[a]] / d;
        if (std::isfinite(g) && g > kTiny && g < gamma) {
          gamma = g;
          drop_pos = static_cast<int>(a);
          next_enter = -1;
        }
      }
    }
    bool stop = false;
    if ((big_c - gamma * big_a) / n < alpha_min) {
      gamma = (big_c - alpha_min * n) / big_a;
      next_enter = -1;
      drop_pos = -1;
      stop = true;
    }
    for (Eigen::Index a = 0; a < k; ++a) beta[active[a]] += gamma * sign[static_cast<std::size_t>(a)] * w[a];
    r = c.y - c.x * beta;
    corr = c.x.transpose() * r;
    big_c = std::max(0.0, big_c - gamma * big_a);
    dropped = -1;
    if (drop_pos >= 0) {
      const int j = active[static_cast<std::size_t>(drop_pos)];
      beta[j] = 0.0;
      in_active[static_cast<std::size_t>(j)] = 0;
      active.erase(active.begin() + drop_pos);
      sign.erase(sign.begin() + drop_pos);
      dropped = j;
    }
    record(big_c);
    if (stop || big_c <= kTiny * c0) break;
    if (drop_pos < 0 && next_enter < 0) break;  // reached the least-squares fit on the active set
    enter = next_enter;
  }
  return path;
}

namespace detail {

LinearState fit_lasso_lars(const ModelSpec& spec, const Matrix& X, const Vector& y, FitInfo& info) {
  const LarsPath path =
      least_angle(X, y, LarsVariant::lasso, spec.param("alpha"), static_cast<int>(X.cols()));
  info.iterations = static_cast<int>(path.steps.size()) - 1;
  info.rank_deficient = path.degenerate;
  return path.steps.back().state;
}

}  // namespace detail

}  // namespace riskpref::models
