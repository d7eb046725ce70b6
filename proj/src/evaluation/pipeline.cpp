#include <cmath>

#include <fmt/format.h>

#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"

namespace riskpref::evaluation {

PreparedData prepare(const DataTable& table, const PipelineConfig& config) {
  const auto& target = table.target(config.target);
  PreparedData out;
  out.split = preprocess::stratified_split(target, config.split);
  const DataTable train = table.select_rows(out.split.train);

  std::vector<double> y_train;
  for (const auto i : out.split.train) y_train.push_back(target[i]);
  out.encoder = preprocess::fit_mestimate(train, y_train, config.smoothing);

  const DataTable encoded = preprocess::encode(out.encoder, table);
  const auto imputed = preprocess::iterative_impute(encoded, config.impute, config.split.seed);
  out.impute_rounds = imputed.rounds;
  const Matrix full = preprocess::to_matrix(imputed.table);

  const std::vector<Eigen::Index> tr(out.split.train.begin(), out.split.train.end());
  const std::vector<Eigen::Index> te(out.split.test.begin(), out.split.test.end());
  const Matrix raw_train = full(tr, Eigen::all);
  out.standardizer = preprocess::fit_standardize(raw_train);
  out.x_train = out.standardizer.apply(raw_train);
  out.x_test = out.standardizer.apply(full(te, Eigen::all));
  const Vector y = preprocess::to_vector(target);
  out.y_train = y(tr);
  out.y_test = y(te);
  out.feature_names = table.feature_names();
  return out;
}

std::string split_descriptor(const PipelineConfig& config, const PreparedData& data) {
  const double test_pct = 100.0 * config.split.test_fraction;
  return fmt::format("{} {:g}/{:g} split, train={}, test={}, strata={}, folds={}, seed={}",
                     data.split.stratified ? "stratified" : "random", 100.0 - test_pct, test_pct,
                     data.split.train.size(), data.split.test.size(), config.split.strata_bins, config.cv.folds,
                     config.split.seed);
}

}  // namespace riskpref::evaluation
