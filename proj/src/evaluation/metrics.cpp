#include <cmath>

#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"
#include "riskpref/kernels.hpp"

namespace riskpref::evaluation {

namespace {

Metrics compute(std::span<const double> y, std::span<const double> y_hat, bool need_rmsle) {
  if (y.empty()) throw ValidationError("metrics need at least one observation", "y");
  if (y.size() != y_hat.size()) throw ValidationError("y and predictions differ in length", "y_hat");
  const auto n = static_cast<double>(y.size());
  double y_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) throw ValidationError("observed values must be finite", "y");
    if (!std::isfinite(y_hat[i])) throw ValidationError("predictions must be finite", "y_hat");
    if (y[i] < 0.0 && need_rmsle) throw ValidationError("RMSLE is undefined for negative observed values", "y");
    y_sum += y[i];
  }
  Metrics m;
  m.mae = kernels::sum_abs_diff(y, y_hat) / n;
  const double ss_res = kernels::sum_sq_diff(y, y_hat);
  m.mse = ss_res / n;
  m.rmse = std::sqrt(m.mse);

  const double y_mean = y_sum / n;
  double ss_tot = 0.0;
  double log_sq = 0.0;
  double ape = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_mean;
    ss_tot += d * d;
    const double l = std::log1p(std::max(y_hat[i], 0.0)) - std::log1p(y[i]);
    log_sq += l * l;
    if (std::abs(y[i]) >= 1e-9) {
      ape += std::abs(y[i] - y_hat[i]) / std::abs(y[i]);
      ++m.mape_effective_n;
    }
  }
  if (ss_tot > 0.0) {
    m.r2 = 1.0 - ss_res / ss_tot;
  } else {
    m.r2 = ss_res == 0.0 ? 1.0 : 0.0;
  }
  m.rmsle = std::sqrt(log_sq / n);
  m.mape = m.mape_effective_n > 0 ? ape / static_cast<double>(m.mape_effective_n) : 0.0;
  return m;
}

}  // namespace

Metrics metrics(std::span<const double> y, std::span<const double> y_hat) { return compute(y, y_hat, true); }

double score(std::span<const double> y, std::span<const double> y_hat, MetricKind kind) {
  return value(compute(y, y_hat, kind == MetricKind::rmsle), kind);
}

std::string_view to_string(MetricKind m) noexcept {
  switch (m) {
    case MetricKind::mae:
      return "mae";
    case MetricKind::mse:
      return "mse";
    case MetricKind::rmse:
      return "rmse";
    case MetricKind::r2:
      return "r2";
    case MetricKind::rmsle:
      return "rmsle";
    case MetricKind::mape:
      return "mape";
  }
  return "?";
}

MetricKind parse_metric(std::string_view name) {
  for (const auto m : {MetricKind::mae, MetricKind::mse, MetricKind::rmse, MetricKind::r2, MetricKind::rmsle,
                       MetricKind::mape}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown metric '" + std::string(name) + "'", "metric");
}

double value(const Metrics& m, MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::mae:
      return m.mae;
    case MetricKind::mse:
      return m.mse;
    case MetricKind::rmse:
      return m.rmse;
    case MetricKind::r2:
      return m.r2;
    case MetricKind::rmsle:
      return m.rmsle;
    case MetricKind::mape:
      return m.mape;
  }
  return 0.0;
}

double loss(const Metrics& m, MetricKind kind) noexcept {
  return kind == MetricKind::r2 ? -m.r2 : value(m, kind);
}

}  // namespace riskpref::evaluation
