#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "riskpref/error.hpp"
#include "riskpref/preprocess.hpp"

using namespace riskpref;
using namespace riskpref::preprocess;

namespace {

Column numeric(std::string name, std::vector<double> v) {
  Column c{std::move(name), FeatureKind::numerical, std::move(v), {}};
  c.missing.resize(c.values.size());
  for (std::size_t i = 0; i < c.values.size(); ++i) c.missing[i] = std::isnan(c.values[i]) ? 1 : 0;
  return c;
}

Column categorical(std::string name, std::vector<double> v) {
  auto c = numeric(std::move(name), std::move(v));
  c.kind = FeatureKind::categorical;
  return c;
}

}  // namespace

TEST_CASE("m-estimate formula") {
  CHECK(mestimate(3, 2.0, 4.0, 1.0) == doctest::Approx(2.5));
  CHECK(mestimate(3, 2.0, 4.0, 0.0) == doctest::Approx(2.0));
  CHECK(mestimate(0, 0.0, 4.0, 5.0) == doctest::Approx(4.0));
}

TEST_CASE("encoder fit and apply") {
  const double nan = std::nan("");
  DataTable t(6);
  t.add_column(categorical("c", {1, 1, 2, 2, 2, nan}));
  t.add_column(numeric("x", {0, 1, 2, 3, 4, 5}));
  const std::vector<double> y{1, 3, 4, 6, 8, 2};
  const auto enc = fit_mestimate(t, y, 2.0);
  CHECK(enc.global_mean == doctest::Approx(4.0));
  REQUIRE(enc.features.size() == 1);
  const auto& m = enc.features[0];
  CHECK(m.levels.at(1.0).encoded == doctest::Approx((2 * 2.0 + 2 * 4.0) / 4.0));
  CHECK(m.levels.at(2.0).encoded == doctest::Approx((3 * 6.0 + 2 * 4.0) / 5.0));
  REQUIRE(m.missing_level.has_value());
  CHECK(m.missing_level->encoded == doctest::Approx((2.0 + 8.0) / 3.0));
  CHECK(enc.encode_value(m, 99.0) == doctest::Approx(4.0));

  const auto out = encode(enc, t);
  CHECK(out.column("c").kind == FeatureKind::numerical);
  CHECK(out.column("c").missing_count() == 0);
  CHECK(out.column("x").values == t.column("x").values);

  const auto back = encoder_from_json(encoder_to_json(enc));
  CHECK(encode(back, t) == out);

  CHECK_THROWS_AS(fit_mestimate(t, y, -1.0), ValidationError);
  CHECK_THROWS_AS(fit_mestimate(t, std::vector<double>{1, 2}, 1.0), ValidationError);
}

TEST_CASE("median and iterative imputation") {
  const double nan = std::nan("");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  const std::size_t n = 300;
  std::vector<double> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = z(rng);
    b[i] = 2 * a[i] + 0.1 * z(rng);
    c[i] = z(rng);
  }
  auto b_masked = b;
  for (std::size_t i = 0; i < n; i += 7) b_masked[i] = nan;
  DataTable t(n);
  t.add_column(numeric("a", a));
  t.add_column(numeric("b", b_masked));
  t.add_column(numeric("c", c));

  const auto med = median_impute(t);
  CHECK(med.column("b").missing_count() == 0);

  ImputeConfig cfg;
  const auto res = iterative_impute(t, cfg, 1);
  CHECK(res.table.column("b").missing_count() == 0);
  CHECK(res.rounds >= 1);
  CHECK(res.rounds <= cfg.max_rounds);
  double err_it = 0, err_med = 0;
  for (std::size_t i = 0; i < n; i += 7) {
    err_it += std::pow(res.table.column("b").values[i] - b[i], 2);
    err_med += std::pow(med.column("b").values[i] - b[i], 2);
  }
  CHECK(err_it < 0.25 * err_med);
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 7 != 0) CHECK(res.table.column("b").values[i] == b[i]);
  }
  CHECK(iterative_impute(t, cfg, 1).table == res.table);

  DataTable empty_col(3);
  empty_col.add_column(numeric("x", {1, 2, 3}));
  empty_col.add_column(numeric("gone", {nan, nan, nan}));
  CHECK_THROWS_WITH_AS(iterative_impute(empty_col, cfg, 1), doctest::Contains("gone"), ValidationError);
  DataTable cat(3);
  cat.add_column(categorical("k", {1, nan, 2}));
  CHECK_THROWS_AS(iterative_impute(cat, cfg, 1), ValidationError);
}

TEST_CASE("stratified split") {
  std::vector<double> y(1000);
  std::mt19937_64 rng(8);
  std::gamma_distribution<double> g(2.0, 1.0);
  for (auto& v : y) v = g(rng);
  const auto s = stratified_split(y, {0.2, 10, 5});
  CHECK(s.stratified);
  CHECK(s.test.size() == 200);
  CHECK(s.train.size() == 800);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  std::vector<std::size_t> all(s.train);
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);

  // Decile shares in the test set stay near 10%.
  auto sorted = y;
  std::sort(sorted.begin(), sorted.end());
  for (int d = 0; d < 10; ++d) {
    const double lo = sorted[d * 100], hi = d == 9 ? 1e300 : sorted[(d + 1) * 100];
    int count = 0;
    for (auto i : s.test) count += (y[i] >= lo && y[i] < hi) ? 1 : 0;
    CHECK(count >= 18);
    CHECK(count <= 22);
  }
  CHECK(stratified_split(y, {0.2, 10, 5}).test == s.test);

  const std::vector<double> flat(50, 1.0);
  const auto f = stratified_split(flat, {0.2, 10, 1});
  CHECK_FALSE(f.stratified);
  CHECK(f.test.size() == 10);
}

TEST_CASE("k-fold indices") {
  const auto folds = kfold_indices(23, 5, 2);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> seen;
  for (std::size_t f = 0; f < 5; ++f) {
    CHECK(folds[f].size() == (f < 3 ? 5u : 4u));
    CHECK(std::is_sorted(folds[f].begin(), folds[f].end()));
    seen.insert(folds[f].begin(), folds[f].end());
  }
  CHECK(seen.size() == 23);
  CHECK_THROWS_AS(kfold_indices(3, 5, 1), ValidationError);
}

TEST_CASE("standardizer") {
  Matrix X(4, 2);
  X << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto s = fit_standardize(X);
  CHECK(s.mean[0] == doctest::Approx(2.5));
  CHECK(s.sd[0] == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.constant[1]);
  const Matrix Z = s.apply(X);
  CHECK(Z.col(0).mean() == doctest::Approx(0.0));
  CHECK(Z(0, 1) == 5.0);
  const auto back = standardizer_from_json(standardizer_to_json(s));
  CHECK(back.apply(X) == Z);
}

TEST_CASE("to_matrix refuses missing cells") {
  DataTable t(2);
  t.add_column(numeric("x", {1, std::nan("")}));
  CHECK_THROWS_AS(to_matrix(t), ValidationError);
}
