#include <algorithm>
#include <cmath>

#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"

namespace riskpref::evaluation {

using models::Family;
using models::ModelSpec;

namespace {

std::vector<double> logspace(int lo_exp, int hi_exp, int per_decade) {
  std::vector<double> out;
  for (int i = lo_exp * per_decade; i <= hi_exp * per_decade; ++i) {
    out.push_back(std::pow(10.0, static_cast<double>(i) / per_decade));
  }
  return out;
}

ModelSpec make(Family f, models::Params p, std::uint64_t seed) { return ModelSpec{f, std::move(p), seed}; }

}  // namespace

std::vector<ModelSpec> default_grid(Family family, std::uint64_t seed) {
  std::vector<ModelSpec> g;
  switch (family) {
    case Family::linear_regression:
    case Family::bayesian_ridge:
    case Family::dummy:
      g.push_back(make(family, {}, seed));
      break;
    case Family::ridge:
      for (const double a : logspace(-4, 2, 1)) g.push_back(make(family, {{"alpha", a}}, seed));
      break;
    case Family::lasso:
      for (const double a : logspace(-4, 2, 4)) g.push_back(make(family, {{"alpha", a}}, seed));
      break;
    case Family::lasso_lars:
      for (const double a : logspace(-4, 2, 2)) g.push_back(make(family, {{"alpha", a}}, seed));
      break;
    case Family::elastic_net:
      for (const double r : {0.2, 0.5, 0.8}) {
        for (const double a : logspace(-4, 2, 2)) g.push_back(make(family, {{"alpha", a}, {"l1_ratio", r}}, seed));
      }
      break;
    case Family::omp:
      for (const double k : {1, 2, 3, 5, 8, 10, 15, 20}) g.push_back(make(family, {{"n_nonzero_coefs", k}}, seed));
      break;
    case Family::huber:
      for (const double e : {1.35, 2.0}) {
        for (const double a : {1e-4, 1e-2, 1.0}) g.push_back(make(family, {{"epsilon", e}, {"alpha", a}}, seed));
      }
      break;
    case Family::passive_aggressive:
      for (const double c : {0.01, 0.1, 1.0}) g.push_back(make(family, {{"C", c}}, seed));
      break;
    case Family::knn:
      for (const double k : {3, 5, 10, 25}) g.push_back(make(family, {{"k", k}}, seed));
      break;
    case Family::decision_tree:
      for (const double d : {2, 3, 4, 5, 6}) g.push_back(make(family, {{"max_depth", d}, {"min_samples_leaf", 5}}, seed));
      break;
    case Family::random_forest:
      for (const double d : {4, 6}) {
        g.push_back(make(family, {{"n_estimators", 100}, {"max_depth", d}, {"max_features", 0.33}}, seed));
      }
      break;
    case Family::extra_trees:
      for (const double d : {4, 6}) {
        g.push_back(make(family, {{"n_estimators", 100}, {"max_depth", d}, {"max_features", 0.33}}, seed));
      }
      break;
    case Family::adaboost:
      for (const double d : {2, 3}) g.push_back(make(family, {{"n_estimators", 50}, {"max_depth", d}}, seed));
      break;
    case Family::gradient_boosting:
      for (const double d : {2, 3}) {
        for (const double n : {100, 300}) {
          g.push_back(make(family, {{"n_estimators", n}, {"max_depth", d}, {"learning_rate", 0.05}}, seed));
        }
      }
      break;
    case Family::lightgbm:
      for (const double l : {4, 15}) {
        for (const double n : {100, 300}) {
          g.push_back(make(family, {{"n_estimators", n}, {"num_leaves", l}, {"learning_rate", 0.05}}, seed));
        }
      }
      break;
    case Family::catboost:
      for (const double d : {2, 4, 6}) {
        g.push_back(make(family, {{"n_estimators", 200}, {"depth", d}, {"learning_rate", 0.05}}, seed));
      }
      break;
  }
  return g;
}

std::vector<FamilyGrid> default_grids(std::uint64_t seed) {
  std::vector<FamilyGrid> out;
  for (const auto f : models::all_families()) out.push_back({f, default_grid(f, seed)});
  return out;
}

std::vector<FamilyGrid> apply_grid_overrides(std::vector<FamilyGrid> grids, const nlohmann::json& overrides,
                                             std::uint64_t seed) {
  if (!overrides.is_object()) throw ValidationError("grid overrides must be a JSON object", "grids");
  for (const auto& [key, specs] : overrides.items()) {
    const Family family = models::parse_family(key);
    if (!specs.is_array() || specs.empty()) {
      throw ValidationError("grid for '" + key + "' must be a non-empty array", "grids." + key);
    }
    std::vector<ModelSpec> grid;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& entry = specs[i];
      const std::string where = "grids." + key + "[" + std::to_string(i) + "]";
      if (!entry.is_object()) throw ValidationError("grid entry must be an object", where);
      ModelSpec spec{family, {}, seed};
      for (const auto& [name, v] : entry.items()) {
        if (!v.is_number()) throw ValidationError("hyperparameter values must be numbers", where + "." + name);
        spec.params[name] = v.get<double>();
      }
      try {
        models::validate(spec);
      } catch (const ValidationError& e) {
        throw ValidationError(e.what(), where + "." + e.field());
      }
      grid.push_back(std::move(spec));
    }
    auto it = std::find_if(grids.begin(), grids.end(), [&](const FamilyGrid& g) { return g.family == family; });
    if (it == grids.end()) {
      grids.push_back({family, std::move(grid)});
    } else {
      it->grid = std::move(grid);
    }
  }
  return grids;
}

const LeaderboardRow& EvalReport::row(Family family) const {
  for (const auto& r : rows) {
    if (r.family == family) return r;
  }
  throw NotFoundError("report has no row for '" + std::string(models::family_key(family)) + "'");
}

EvalReport leaderboard(std::span<const FamilyGrid> grids, const Matrix& x_train, const Vector& y_train,
                       const Matrix& x_test, const Vector& y_test, const CvOptions& options,
                       std::string split_descriptor) {
  if (grids.empty()) throw ValidationError("leaderboard needs at least one model family", "specs");
  std::vector<FamilyGrid> all(grids.begin(), grids.end());
  if (std::none_of(all.begin(), all.end(), [](const FamilyGrid& g) { return g.family == Family::dummy; })) {
    all.push_back({Family::dummy, default_grid(Family::dummy, options.seed)});
  }

  EvalReport report;
  report.sort_key = options.metric;
  report.split = std::move(split_descriptor);
  report.seed = options.seed;
  for (const auto& fg : all) {
    LeaderboardRow row;
    row.family = fg.family;
    try {
      const auto gs = grid_search_cv(fg.grid, x_train, y_train, options);
      row.best_spec = gs.best;
      row.cv_score = gs.table[gs.best_index].mean_score;
      row.cv_fold_scores = gs.table[gs.best_index].fold_scores;
      const Vector pred = gs.refit.predict(x_test);
      row.metrics = metrics({y_test.data(), static_cast<std::size_t>(y_test.size())},
                            {pred.data(), static_cast<std::size_t>(pred.size())});
      row.model = gs.refit;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.metrics.reset();
    }
    report.rows.push_back(std::move(row));
  }

  const auto key = options.metric;
  std::sort(report.rows.begin(), report.rows.end(), [&](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.metrics.has_value() != b.metrics.has_value()) return a.metrics.has_value();
    if (a.metrics) {
      const double la = loss(*a.metrics, key);
      const double lb = loss(*b.metrics, key);
      if (la != lb) return la < lb;
    }
    return models::display_name(a.family) < models::display_name(b.family);
  });
  const auto dummy = std::find_if(report.rows.begin(), report.rows.end(),
                                  [](const LeaderboardRow& r) { return r.family == Family::dummy; });
  if (dummy != report.rows.end() && dummy->metrics) {
    const double base = loss(*dummy->metrics, key);
    for (auto& r : report.rows) r.beats_dummy = r.metrics && loss(*r.metrics, key) < base;
  }
  return report;
}

}  // namespace riskpref::evaluation
