#include <array>
#include <cmath>
#include <sstream>

#include "riskpref/error.hpp"
#include "riskpref/models.hpp"

namespace riskpref::models {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view key;
  std::string_view display;
};

constexpr std::array<FamilyInfo, kFamilyCount> kFamilies{{
    {Family::linear_regression, "linear_regression", "Linear Regression"},
    {Family::ridge, "ridge", "Ridge Regression"},
    {Family::lasso, "lasso", "Lasso Regression"},
    {Family::elastic_net, "elastic_net", "Elastic Net"},
    {Family::lasso_lars, "lasso_lars", "Lasso Least Angle Regression"},
    {Family::omp, "omp", "Orthogonal Matching Pursuit"},
    {Family::bayesian_ridge, "bayesian_ridge", "Bayesian Ridge"},
    {Family::huber, "huber", "Huber Regressor"},
    {Family::passive_aggressive, "passive_aggressive", "Passive Aggressive Regressor"},
    {Family::knn, "knn", "KNN Regressor"},
    {Family::decision_tree, "decision_tree", "Decision Tree"},
    {Family::random_forest, "random_forest", "Random Forest Regressor"},
    {Family::extra_trees, "extra_trees", "Extra Trees Regressor"},
    {Family::adaboost, "adaboost", "Adaboost Regressor"},
    {Family::gradient_boosting, "gradient_boosting", "Gradient Boosting Regressor"},
    {Family::lightgbm, "lightgbm", "Light Gradient Boosting Machine"},
    {Family::catboost, "catboost", "Catboost Regressor"},
    {Family::dummy, "dummy", "Dummy Regressor"},
}};

constexpr std::array<Family, kFamilyCount> kFamilyList = [] {
  std::array<Family, kFamilyCount> out{};
  for (std::size_t i = 0; i < kFamilyCount; ++i) out[i] = kFamilies[i].family;
  return out;
}();

// Integer-valued hyperparameters and their lower bounds.
struct IntParam {
  std::string_view name;
  double min;
};
constexpr std::array<IntParam, 9> kIntParams{{
    {"max_iter", 1},
    {"n_nonzero_coefs", 0},
    {"k", 1},
    {"max_depth", 0},
    {"min_samples_leaf", 1},
    {"n_estimators", 0},
    {"num_leaves", 2},
    {"max_bins", 2},
    {"depth", 1},
}};

}  // namespace

std::span<const Family> all_families() { return kFamilyList; }

std::string_view display_name(Family family) noexcept {
  for (const auto& i : kFamilies) {
    if (i.family == family) return i.display;
  }
  return "?";
}

std::string_view family_key(Family family) noexcept {
  for (const auto& i : kFamilies) {
    if (i.family == family) return i.key;
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (const auto& i : kFamilies) {
    if (i.key == name || i.display == name) return i.family;
  }
  throw ValidationError("unknown model family '" + std::string(name) + "'", "family");
}

bool is_linear(Family family) noexcept {
  switch (family) {
    case Family::linear_regression:
    case Family::ridge:
    case Family::lasso:
    case Family::elastic_net:
    case Family::lasso_lars:
    case Family::omp:
    case Family::bayesian_ridge:
    case Family::huber:
    case Family::passive_aggressive:
      return true;
    default:
      return false;
  }
}

bool has_importance(Family family) noexcept { return family != Family::knn && family != Family::dummy; }

std::string_view to_string(GrowthMode mode) noexcept {
  switch (mode) {
    case GrowthMode::depthwise:
      return "depthwise";
    case GrowthMode::leafwise:
      return "leafwise";
    case GrowthMode::oblivious:
      return "oblivious";
  }
  return "?";
}

const Params& default_params(Family family) {
  static const std::map<Family, Params> defaults = {
      {Family::linear_regression, {}},
      {Family::ridge, {{"alpha", 1.0}}},
      {Family::lasso, {{"alpha", 1.0}, {"tol", 1e-7}, {"max_iter", 10000}}},
      {Family::elastic_net, {{"alpha", 1.0}, {"l1_ratio", 0.5}, {"tol", 1e-7}, {"max_iter", 10000}}},
      {Family::lasso_lars, {{"alpha", 1.0}}},
      {Family::omp, {{"n_nonzero_coefs", 0}}},  // 0: ten percent of the features
      {Family::bayesian_ridge, {{"max_iter", 1000}, {"tol", 1e-8}}},
      {Family::huber, {{"epsilon", 1.35}, {"alpha", 1e-4}, {"max_iter", 100}, {"tol", 1e-7}}},
      {Family::passive_aggressive, {{"C", 1.0}, {"epsilon", 0.1}}},
      {Family::knn, {{"k", 5}}},
      {Family::decision_tree, {{"max_depth", 0}, {"min_samples_leaf", 1}}},
      {Family::random_forest,
       {{"n_estimators", 100}, {"max_depth", 0}, {"min_samples_leaf", 1}, {"max_features", 1.0},
        {"bootstrap", 1}}},
      {Family::extra_trees,
       {{"n_estimators", 100}, {"max_depth", 0}, {"min_samples_leaf", 1}, {"max_features", 1.0}}},
      {Family::adaboost, {{"n_estimators", 50}, {"learning_rate", 1.0}, {"max_depth", 3}}},
      {Family::gradient_boosting,
       {{"n_estimators", 100}, {"learning_rate", 0.1}, {"max_depth", 3}, {"min_samples_leaf", 1}}},
      {Family::lightgbm,
       {{"n_estimators", 100}, {"learning_rate", 0.1}, {"num_leaves", 31}, {"max_depth", 0},
        {"min_samples_leaf", 20}, {"max_bins", 255}}},
      {Family::catboost, {{"n_estimators", 100}, {"learning_rate", 0.1}, {"depth", 6}, {"max_bins", 255}}},
      {Family::dummy, {}},
  };
  return defaults.at(family);
}

double ModelSpec::param(const std::string& name) const {
  if (const auto it = params.find(name); it != params.end()) return it->second;
  const auto& d = default_params(family);
  if (const auto it = d.find(name); it != d.end()) return it->second;
  throw ValidationError("family '" + std::string(family_key(family)) + "' has no hyperparameter '" + name + "'",
                        name);
}

void validate(const ModelSpec& spec) {
  const auto& defaults = default_params(spec.family);
  for (const auto& [name, value] : spec.params) {
    if (!defaults.contains(name)) {
      throw ValidationError("family '" + std::string(family_key(spec.family)) + "' has no hyperparameter '" + name +
                                "'",
                            name);
    }
    if (!std::isfinite(value)) throw ValidationError("hyperparameter must be finite", name);
  }
  auto bad = [&](const std::string& name, const std::string& rule) {
    throw ValidationError("hyperparameter " + name + " must be " + rule, name);
  };
  for (const auto& [name, _] : defaults) {
    const double v = spec.param(name);
    for (const auto& ip : kIntParams) {
      if (ip.name == name) {
        if (v != std::floor(v)) bad(name, "an integer");
        if (v < ip.min) bad(name, ">= " + std::to_string(static_cast<int>(ip.min)));
      }
    }
    if (name == "alpha" && v < 0) bad(name, ">= 0");
    if (name == "l1_ratio" && !(v >= 0 && v <= 1)) bad(name, "in [0, 1]");
    if (name == "tol" && !(v > 0)) bad(name, "> 0");
    if (name == "learning_rate" && !(v > 0 && v <= 1)) bad(name, "in (0, 1]");
    if (name == "max_features" && !(v > 0 && v <= 1)) bad(name, "in (0, 1]");
    if (name == "epsilon" && v < 0) bad(name, ">= 0");
    if (name == "C" && !(v > 0)) bad(name, "> 0");
    if (name == "bootstrap" && v != 0 && v != 1) bad(name, "0 or 1");
  }
  if (spec.family == Family::huber && !(spec.param("epsilon") >= 1.0)) bad("epsilon", ">= 1");
}

std::string describe(const ModelSpec& spec) {
  std::ostringstream out;
  out << family_key(spec.family) << '(';
  bool first = true;
  for (const auto& [name, value] : spec.params) {
    if (!first) out << ", ";
    first = false;
    out << name << '=' << value;
  }
  out << ')';
  return out.str();
}

}  // namespace riskpref::models
