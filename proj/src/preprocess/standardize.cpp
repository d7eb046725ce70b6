#include <cmath>

#include "riskpref/error.hpp"
#include "riskpref/preprocess.hpp"

namespace riskpref::preprocess {

Matrix Standardizer::apply(const Matrix& X) const {
  if (X.cols() != mean.size()) throw ValidationError("column count does not match the standardizer", "X");
  Matrix out = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (constant[static_cast<std::size_t>(j)]) continue;
    out.col(j) = (X.col(j).array() - mean[j]) / sd[j];
  }
  return out;
}

Standardizer fit_standardize(const Matrix& train) {
  Standardizer s;
  const auto n = train.rows();
  const auto p = train.cols();
  s.mean = Vector::Zero(p);
  s.sd = Vector::Ones(p);
  s.constant.assign(static_cast<std::size_t>(p), 1);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (n < 2) continue;
    const double m = train.col(j).mean();
    const double var = (train.col(j).array() - m).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0) || !std::isfinite(sd) || sd <= 1e-12 * std::abs(m)) continue;
    s.mean[j] = m;
    s.sd[j] = sd;
    s.constant[static_cast<std::size_t>(j)] = 0;
  }
  return s;
}

nlohmann::json standardizer_to_json(const Standardizer& s) {
  std::vector<bool> constant(s.constant.begin(), s.constant.end());
  return {{"format", "riskpref.standardizer"},
          {"version", 1},
          {"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
          {"sd", std::vector<double>(s.sd.data(), s.sd.data() + s.sd.size())},
          {"constant", constant}};
}

Standardizer standardizer_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "riskpref.standardizer" || doc.at("version") != 1) {
      throw ValidationError("not a standardizer document (version 1)", "format");
    }
    const auto mean = doc.at("mean").get<std::vector<double>>();
    const auto sd = doc.at("sd").get<std::vector<double>>();
    const auto constant = doc.at("constant").get<std::vector<bool>>();
    if (mean.size() != sd.size() || mean.size() != constant.size()) {
      throw ValidationError("standardizer arrays differ in length", "mean");
    }
    Standardizer s;
    s.mean = to_vector(mean);
    s.sd = to_vector(sd);
    s.constant.assign(constant.begin(), constant.end());
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed standardizer document: ") + e.what(), "standardizer");
  }
}

Matrix to_matrix(const DataTable& table) {
  Matrix m(static_cast<Eigen::Index>(table.rows()), static_cast<Eigen::Index>(table.cols()));
  for (std::size_t j = 0; j < table.cols(); ++j) {
    const auto& col = table.columns()[j];
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (col.is_missing(r)) throw ValidationError("column '" + col.name + "' has missing cells", col.name);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = col.values[r];
    }
  }
  return m;
}

Vector to_vector(std::span<const double> v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace riskpref::preprocess
