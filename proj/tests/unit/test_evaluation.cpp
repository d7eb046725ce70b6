#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"

using namespace riskpref;
using namespace riskpref::evaluation;
using models::Family;
using models::ModelSpec;

namespace {

struct Data {
  Matrix X;
  Vector y;
};

Data planted(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Data d{Matrix(n, p), Vector(n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) d.X(i, j) = z(rng);
    d.y[i] = 10.0 + 2.0 * d.X(i, 0) - 1.5 * d.X(i, 1) + 0.3 * z(rng);
  }
  return d;
}

}  // namespace

TEST_CASE("metrics on a hand example") {
  const std::vector<double> y{1, 2, 4};
  const std::vector<double> p{2, 2, 2};
  const auto m = metrics(y, p);
  CHECK(m.mae == doctest::Approx(1.0));
  CHECK(m.mse == doctest::Approx(5.0 / 3.0));
  CHECK(m.rmse == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(m.r2 == doctest::Approx(1.0 - 5.0 / (14.0 / 3.0)));
  CHECK(m.mape == doctest::Approx((1.0 + 0.0 + 0.5) / 3.0));
  const double l = (std::pow(std::log(3.0) - std::log(2.0), 2) + std::pow(std::log(3.0) - std::log(5.0), 2)) / 3.0;
  CHECK(m.rmsle == doctest::Approx(std::sqrt(l)));
}

TEST_CASE("metric edge cases") {
  const std::vector<double> y{0.0, 2.0};
  const std::vector<double> p{1.0, 1.0};
  const auto m = metrics(y, p);
  CHECK(m.mape_effective_n == 1);
  CHECK(m.mape == doctest::Approx(0.5));
  CHECK_THROWS_AS(metrics(std::vector<double>{}, std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(metrics(y, std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(metrics(std::vector<double>{-1.0}, std::vector<double>{1.0}), ValidationError);
  CHECK(score(std::vector<double>{-1.0}, std::vector<double>{1.0}, MetricKind::mae) == 2.0);
  CHECK(loss(m, MetricKind::r2) == -m.r2);
  CHECK(parse_metric("mape") == MetricKind::mape);
  CHECK_THROWS_AS(parse_metric("auc"), ValidationError);
}

TEST_CASE("grid search picks the right regularization") {
  const auto d = planted(150, 4, 1);
  const std::vector<ModelSpec> grid{{Family::ridge, {{"alpha", 0.0}}, 0}, {Family::ridge, {{"alpha", 1e6}}, 0}};
  CvOptions cv;
  cv.folds = 5;
  cv.metric = MetricKind::mse;
  const auto gs = grid_search_cv(grid, d.X, d.y, cv);
  CHECK(gs.best_index == 0);
  CHECK(gs.table.size() == 2);
  CHECK(gs.table[0].fold_scores.size() == 5);
  CHECK(gs.table[0].mean_score < gs.table[1].mean_score);

  const std::vector<ModelSpec> single{{Family::lasso, {{"alpha", 0.1}}, 0}};
  CHECK(grid_search_cv(single, d.X, d.y, cv).best == single[0]);
  CHECK_THROWS_AS(grid_search_cv(std::vector<ModelSpec>{}, d.X, d.y, cv), ValidationError);

  const std::vector<ModelSpec> tie{{Family::dummy, {}, 0}, {Family::dummy, {}, 0}};
  CHECK(grid_search_cv(tie, d.X, d.y, cv).best_index == 0);
}

TEST_CASE("grid search is deterministic across thread counts") {
  const auto d = planted(120, 5, 2);
  const auto grid = default_grid(Family::lasso, 3);
  CvOptions one;
  one.threads = 1;
  CvOptions many = one;
  many.threads = 4;
  const auto a = grid_search_cv(grid, d.X, d.y, one);
  const auto b = grid_search_cv(grid, d.X, d.y, many);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) CHECK(a.table[i].fold_scores == b.table[i].fold_scores);
}

TEST_CASE("RFECV keeps the informative columns") {
  const auto d = planted(200, 6, 4);
  CvOptions cv;
  cv.folds = 5;
  cv.metric = MetricKind::mse;
  const auto r = rfecv({Family::lasso, {{"alpha", 0.01}}, 0}, d.X, d.y, cv);
  CHECK(r.steps.size() == 6);
  CHECK(r.steps.front().features.size() == 6);
  CHECK(r.steps.back().features.size() == 1);
  CHECK(r.steps.back().features[0] == 0);
  CHECK(r.selected.size() >= 2);
  CHECK(std::find(r.selected.begin(), r.selected.end(), 1) != r.selected.end());
  CHECK(r.best().features == r.selected);
  CHECK_THROWS_AS(rfecv({Family::knn, {}, 0}, d.X, d.y, cv), ValidationError);
}

TEST_CASE("leaderboard on planted signal") {
  const auto tr = planted(150, 4, 5);
  const auto te = planted(60, 4, 6);
  std::vector<FamilyGrid> grids{{Family::lasso, default_grid(Family::lasso, 0)},
                                {Family::ridge, default_grid(Family::ridge, 0)}};
  CvOptions cv;
  cv.folds = 4;
  const auto rep = leaderboard(grids, tr.X, tr.y, te.X, te.y, cv, "test");
  CHECK(rep.rows.size() == 3);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i - 1].metrics->mape <= rep.rows[i].metrics->mape);
  }
  CHECK(rep.row(Family::lasso).beats_dummy);
  CHECK_FALSE(rep.row(Family::dummy).beats_dummy);
  CHECK(rep.row(Family::lasso).cv_fold_scores.size() == 4);
  CHECK(rep.row(Family::lasso).model.has_value());
  CHECK(leaderboard_text(rep).find("Lasso") != std::string::npos);
  CHECK(leaderboard_json(rep)["rows"].size() == 3);
  CHECK(leaderboard_csv(rep) == leaderboard_csv(leaderboard(grids, tr.X, tr.y, te.X, te.y, cv, "test")));
}

TEST_CASE("grid overrides") {
  auto grids = default_grids(0);
  CHECK(grids.size() == models::kFamilyCount);
  const auto over = apply_grid_overrides(grids, nlohmann::json::parse(R"({"lasso": [{"alpha": 0.5}]})"), 0);
  for (const auto& g : over) {
    if (g.family == Family::lasso) {
      REQUIRE(g.grid.size() == 1);
      CHECK(g.grid[0].param("alpha") == 0.5);
    }
  }
  CHECK_THROWS_AS(apply_grid_overrides(grids, nlohmann::json::parse(R"({"svm": []})"), 0), ValidationError);
  CHECK_THROWS_AS(apply_grid_overrides(grids, nlohmann::json::parse(R"({"lasso": [{"beta": 1}]})"), 0),
                  ValidationError);
}

TEST_CASE("lasso importance report") {
  const auto d = planted(100, 4, 7);
  const auto m = models::fit({Family::lasso, {{"alpha", 0.3}}, 0}, d.X, d.y);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const auto imp = lasso_importance(m, names);
  REQUIRE(imp.nonzero.size() >= 2);
  CHECK(imp.nonzero[0].first == "a");
  CHECK(imp.nonzero[1].first == "b");
  CHECK(imp.nonzero[1].second < 0);
  CHECK(imp.eliminated + imp.nonzero.size() == 4);
  CHECK(lasso_importance_csv(imp).find("a,") != std::string::npos);
}

TEST_CASE("quantiles and box summaries") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 100};
  const auto b = box_summary("m", s);
  CHECK(b.median == doctest::Approx(5.5));
  CHECK(b.outliers == std::vector<double>{100});
  CHECK(b.max == 9.0);
  CHECK(b.min == 1.0);
  CHECK_THROWS_AS(box_summary("m", std::vector<double>{1, 2, 3}), ValidationError);
  const auto boxes = fold_distribution_export({{"x", s}, {"y", {1, 1, 1, 1}}});
  CHECK(boxes.size() == 2);
  CHECK(fold_distribution_json(boxes).size() == 2);
}

TEST_CASE("prepare produces train-fitted standardized matrices") {
  const auto full = generate(register_schema(), default_gen_config(300, 5)).first;
  const auto table = apply_missingness(full, register_schema(), 5);
  PipelineConfig cfg;
  cfg.impute.max_rounds = 2;
  const auto p = prepare(table, cfg);
  CHECK(p.x_train.rows() == 240);
  CHECK(p.x_test.rows() == 60);
  CHECK(p.x_train.cols() == 66);
  CHECK(p.feature_names.size() == 66);
  CHECK(p.x_train.allFinite());
  CHECK(p.x_test.allFinite());
  for (int j = 0; j < p.x_train.cols(); ++j) {
    if (!p.standardizer.constant[j]) CHECK(std::fabs(p.x_train.col(j).mean()) < 1e-9);
  }
  const auto again = prepare(table, cfg);
  CHECK(again.x_train == p.x_train);
  CHECK(again.x_test == p.x_test);
  CHECK_FALSE(split_descriptor(cfg, p).empty());
}
