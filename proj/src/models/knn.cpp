#include <algorithm>

#include "internal.hpp"
#include "riskpref/kernels.hpp"

namespace riskpref::models::detail {

KnnState fit_knn(const ModelSpec& spec, const Matrix& X, const Vector& y) {
  KnnState s;
  s.k = std::min(as_int(spec.param("k")), static_cast<int>(X.rows()));
  s.n_features = static_cast<std::size_t>(X.cols());
  s.rows.resize(static_cast<std::size_t>(X.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(s.rows.data(), X.rows(),
                                                                                     X.cols()) = X;
  s.targets = y;
  return s;
}

Vector predict_knn(const KnnState& state, const Matrix& X) {
  const std::size_t p = state.n_features;
  const auto n_train = static_cast<std::size_t>(state.targets.size());
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> q = X;
  const auto k = static_cast<std::size_t>(state.k);
  Vector out(X.rows());
  std::vector<std::pair<double, std::size_t>> dist(n_train);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const std::span<const double> query(q.data() + static_cast<std::size_t>(r) * p, p);
    for (std::size_t i = 0; i < n_train; ++i) {
      dist[i] = {kernels::sum_sq_diff(query, std::span<const double>(state.rows.data() + i * p, p)), i};
    }
    // (distance, index) ordering: equidistant neighbours resolve to the lowest training index
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += state.targets[static_cast<Eigen::Index>(dist[i].second)];
    out[r] = acc / static_cast<double>(k);
  }
  return out;
}

}  // namespace riskpref::models::detail
