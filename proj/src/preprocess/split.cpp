#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskpref/error.hpp"
#include "riskpref/preprocess.hpp"
#include "riskpref/random.hpp"

namespace riskpref::preprocess {

namespace {

std::size_t test_size(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("test_fraction must lie in (0, 1)", "test_fraction");
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
}

SplitIndices finish(std::vector<std::size_t> test, std::size_t n, bool stratified) {
  SplitIndices s;
  s.stratified = stratified;
  std::sort(test.begin(), test.end());
  std::vector<char> in_test(n, 0);
  for (const auto i : test) in_test[i] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_test[i]) s.train.push_back(i);
  }
  s.test = std::move(test);
  return s;
}

}  // namespace

SplitIndices random_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  const std::size_t n_test = test_size(n, test_fraction);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_rng(seed, streams::kSplit);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(n_test);
  return finish(std::move(perm), n, false);
}

SplitIndices stratified_split(std::span<const double> target, const SplitPlan& plan) {
  const std::size_t n = target.size();
  if (plan.strata_bins < 1) throw ValidationError("strata_bins must be >= 1", "strata_bins");
  const auto bins = static_cast<std::size_t>(plan.strata_bins);
  if (n < bins) throw ValidationError("need at least strata_bins rows", "strata_bins");
  const std::size_t n_test = test_size(n, plan.test_fraction);
  if (n == 0) return {};

  const auto [lo, hi] = std::minmax_element(target.begin(), target.end());
  if (*lo == *hi) return random_split(n, plan.test_fraction, plan.seed);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return target[a] < target[b]; });
  std::vector<std::vector<std::size_t>> strata(bins);
  for (std::size_t rank = 0; rank < n; ++rank) strata[rank * bins / n].push_back(order[rank]);

  // largest-remainder allocation of the test quota
  std::vector<std::size_t> quota(bins);
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t assigned = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double exact = static_cast<double>(strata[b].size()) * static_cast<double>(n_test) / static_cast<double>(n);
    quota[b] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[b];
    remainder.emplace_back(exact - static_cast<double>(quota[b]), b);
  }
  std::stable_sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n_test; ++i, ++assigned) quota[remainder[i % bins].second] += 1;

  std::vector<std::size_t> test;
  for (std::size_t b = 0; b < bins; ++b) {
    Rng rng = make_rng(plan.seed, streams::kSplit, b + 1);
    std::shuffle(strata[b].begin(), strata[b].end(), rng);
    test.insert(test.end(), strata[b].begin(), strata[b].begin() + static_cast<std::ptrdiff_t>(quota[b]));
  }
  return finish(std::move(test), n, true);
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be >= 2", "k");
  if (k > n) throw ValidationError("k must not exceed the number of rows", "k");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_rng(seed, streams::kFolds);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                    perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

}  // namespace riskpref::preprocess
