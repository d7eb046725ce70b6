#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskpref/error.hpp"
#include "riskpref/preprocess.hpp"

namespace riskpref::preprocess {

namespace {

double median_of_observed(const Column& col) {
  std::vector<double> v;
  for (std::size_t r = 0; r < col.values.size(); ++r) {
    if (!col.is_missing(r)) v.push_back(col.values[r]);
  }
  if (v.empty()) throw ValidationError("column '" + col.name + "' is entirely missing", col.name);
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

void check_categoricals(const DataTable& table) {
  for (const auto& col : table.columns()) {
    if (col.kind == FeatureKind::categorical && col.missing_count() > 0) {
      throw ValidationError("categorical column '" + col.name + "' has missing cells; encode it first", col.name);
    }
  }
}

}  // namespace

models::ModelSpec ImputeConfig::default_learner() {
  models::ModelSpec spec;
  spec.family = models::Family::lightgbm;
  spec.params = {{"n_estimators", 40},    {"learning_rate", 0.2}, {"num_leaves", 15},
                 {"min_samples_leaf", 10}, {"max_bins", 64}};
  return spec;
}

void ImputeConfig::validate() const {
  if (max_rounds < 1) throw ValidationError("max_rounds must be >= 1", "max_rounds");
  if (!(tol > 0.0)) throw ValidationError("tol must be > 0", "tol");
  models::validate(learner);
}

DataTable median_impute(const DataTable& table) {
  check_categoricals(table);
  DataTable out = table;
  for (auto& col : out.columns()) {
    if (col.missing_count() == 0) continue;
    const double m = median_of_observed(col);
    for (std::size_t r = 0; r < out.rows(); ++r) {
      if (col.is_missing(r)) {
        col.values[r] = m;
        col.missing[r] = 0;
      }
    }
  }
  return out;
}

ImputeResult iterative_impute(const DataTable& table, const ImputeConfig& config, std::uint64_t seed) {
  config.validate();
  check_categoricals(table);
  const std::size_t n = table.rows();
  const std::size_t p = table.cols();

  std::vector<std::size_t> targets;
  for (std::size_t j = 0; j < p; ++j) {
    const auto& col = table.columns()[j];
    if (col.missing_count() == 0) continue;
    if (col.missing_count() == n) throw ValidationError("column '" + col.name + "' is entirely missing", col.name);
    targets.push_back(j);
  }
  std::stable_sort(targets.begin(), targets.end(), [&](std::size_t a, std::size_t b) {
    return table.columns()[a].missing_count() > table.columns()[b].missing_count();
  });

  ImputeResult result;
  for (const auto j : targets) result.order.push_back(table.columns()[j].name);
  if (targets.empty()) {
    result.table = table;
    return result;
  }

  Matrix current = to_matrix(median_impute(table));
  models::ModelSpec learner = config.learner;
  learner.seed = substream_seed(seed, streams::kImpute);

  for (int round = 1; round <= config.max_rounds; ++round) {
    double max_change = 0.0;
    for (const auto j : targets) {
      const auto& col = table.columns()[j];
      std::vector<Eigen::Index> obs;
      std::vector<Eigen::Index> miss;
      for (std::size_t r = 0; r < n; ++r) (col.is_missing(r) ? miss : obs).push_back(static_cast<Eigen::Index>(r));
      std::vector<Eigen::Index> others;
      for (std::size_t c = 0; c < p; ++c) {
        if (c != j) others.push_back(static_cast<Eigen::Index>(c));
      }
      const Matrix x_obs = current(obs, others);
      const Vector y_obs = current(obs, static_cast<Eigen::Index>(j));
      const auto model = models::fit(learner, x_obs, y_obs);
      const Vector pred = model.predict(current(miss, others));
      for (std::size_t m = 0; m < miss.size(); ++m) {
        double& cell = current(miss[m], static_cast<Eigen::Index>(j));
        max_change = std::max(max_change, std::abs(pred[static_cast<Eigen::Index>(m)] - cell));
        cell = pred[static_cast<Eigen::Index>(m)];
      }
    }
    result.rounds = round;
    result.last_change = max_change;
    if (max_change < config.tol) break;
  }

  result.table = table;
  for (const auto j : targets) {
    auto& col = result.table.columns()[j];
    for (std::size_t r = 0; r < n; ++r) {
      if (col.is_missing(r)) {
        col.values[r] = current(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        col.missing[r] = 0;
      }
    }
  }
  return result;
}

nlohmann::json impute_report_json(const ImputeConfig& config, const ImputeResult& result) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : config.learner.params) params[k] = v;
  return {{"format", "riskpref.impute"},
          {"version", 1},
          {"max_rounds", config.max_rounds},
          {"tol", std::isfinite(config.tol) ? nlohmann::json(config.tol) : nlohmann::json("inf")},
          {"learner", {{"family", models::family_key(config.learner.family)}, {"params", params}}},
          {"rounds_executed", result.rounds},
          {"last_change", result.last_change},
          {"order", result.order}};
}

}  // namespace riskpref::preprocess
