#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models {

BinnedMatrix::BinnedMatrix(const Matrix& X, int max_bins)
    : rows_(static_cast<std::size_t>(X.rows())),
      codes_(static_cast<std::size_t>(X.size())),
      thresholds_(static_cast<std::size_t>(X.cols())) {
  if (max_bins < 2 || max_bins > 65536) throw ValidationError("max_bins must lie in [2, 65536]", "max_bins");
  std::vector<double> sorted(rows_);
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& thr = thresholds_[static_cast<std::size_t>(f)];
    std::copy(X.col(f).data(), X.col(f).data() + X.rows(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct(sorted);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        const double m = distinct[i] + 0.5 * (distinct[i + 1] - distinct[i]);
        thr.push_back(m >= distinct[i + 1] ? distinct[i] : m);
      }
    } else {
      // equal-frequency cut points, placed between neighbouring distinct values
      for (int b = 1; b < max_bins; ++b) {
        const auto idx = static_cast<std::size_t>(static_cast<double>(b) * static_cast<double>(rows_) / max_bins);
        if (idx == 0 || idx >= rows_) continue;
        const double a = sorted[idx - 1];
        const double c = sorted[idx];
        if (a == c) continue;
        const double m = a + 0.5 * (c - a);
        const double t = m >= c ? a : m;
        if (thr.empty() || t > thr.back()) thr.push_back(t);
      }
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      const double v = X(static_cast<Eigen::Index>(r), f);
      const auto code = std::lower_bound(thr.begin(), thr.end(), v) - thr.begin();
      codes_[static_cast<std::size_t>(f) * rows_ + r] = static_cast<std::uint16_t>(code);
    }
  }
}

namespace {

struct LeafSplit {
  int feature = -1;
  int bin = -1;
  double gain = 0.0;
};

struct Hist {
  std::vector<double> sum;
  std::vector<int> count;
};

double mean_of(const Vector& t, std::span<const int> rows) {
  double s = 0.0;
  for (const int r : rows) s += t[r];
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

double sse_of(const Vector& t, std::span<const int> rows, double mean) {
  double s = 0.0;
  for (const int r : rows) s += (t[r] - mean) * (t[r] - mean);
  return s;
}

bool worth_splitting(std::size_t count, double sse, double mean) {
  return count >= 2 && sse > 1e-20 * static_cast<double>(count) * (mean * mean + 1.0);
}

LeafSplit best_leaf_split(const BinnedMatrix& b, const Vector& t, std::span<const int> rows, int min_samples_leaf,
                          Hist& h) {
  LeafSplit best;
  const double mean = mean_of(t, rows);
  const double sse = sse_of(t, rows, mean);
  if (!worth_splitting(rows.size(), sse, mean) || static_cast<int>(rows.size()) < 2 * min_samples_leaf) return best;
  best.gain = 1e-12 * sse;
  const int n = static_cast<int>(rows.size());
  for (std::size_t f = 0; f < b.cols(); ++f) {
    const int bins = b.bins(f);
    if (bins < 2) continue;
    h.sum.assign(static_cast<std::size_t>(bins), 0.0);
    h.count.assign(static_cast<std::size_t>(bins), 0);
    for (const int r : rows) {
      const auto c = b.code(static_cast<std::size_t>(r), f);
      h.sum[c] += t[r] - mean;
      h.count[c] += 1;
    }
    double sl = 0.0;
    int nl = 0;
    for (int bin = 0; bin + 1 < bins; ++bin) {
      sl += h.sum[static_cast<std::size_t>(bin)];
      nl += h.count[static_cast<std::size_t>(bin)];
      const int nr = n - nl;
      if (nl < min_samples_leaf) continue;
      if (nr < min_samples_leaf) break;
      if (h.count[static_cast<std::size_t>(bin)] == 0) continue;  // same partition as an earlier bin
      const double gain = sl * sl / nl + sl * sl / nr;  // right sum is -sl after centering
      if (gain > best.gain) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.bin = bin;
      }
    }
  }
  return best;
}

}  // namespace

Tree build_leafwise_tree(const BinnedMatrix& binned, const Vector& target, const TreeParams& params) {
  struct Leaf {
    int node;
    int depth;
    std::vector<int> rows;
    LeafSplit split;
  };
  Hist h;
  Tree tree;
  tree.mode = GrowthMode::leafwise;
  std::vector<Leaf> leaves;
  auto make_leaf = [&](std::vector<int> rows, int depth) {
    TreeNode nd;
    nd.value = mean_of(target, rows);
    nd.samples = static_cast<int>(rows.size());
    tree.nodes.push_back(nd);
    Leaf leaf{static_cast<int>(tree.nodes.size()) - 1, depth, std::move(rows), {}};
    if (params.max_depth <= 0 || depth < params.max_depth) {
      leaf.split = best_leaf_split(binned, target, leaf.rows, params.min_samples_leaf, h);
    }
    leaves.push_back(std::move(leaf));
  };
  std::vector<int> all(binned.rows());
  std::iota(all.begin(), all.end(), 0);
  make_leaf(std::move(all), 0);

  const int max_leaves = std::max(params.max_leaves, 2);
  int n_leaves = 1;
  while (n_leaves < max_leaves) {
    int pick = -1;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].split.feature < 0) continue;
      if (pick < 0 || leaves[i].split.gain > leaves[static_cast<std::size_t>(pick)].split.gain) {
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) break;
    Leaf leaf = std::move(leaves[static_cast<std::size_t>(pick)]);
    leaves.erase(leaves.begin() + pick);
    const auto f = static_cast<std::size_t>(leaf.split.feature);
    std::vector<int> left;
    std::vector<int> right;
    for (const int r : leaf.rows) {
      (binned.code(static_cast<std::size_t>(r), f) <= leaf.split.bin ? left : right).push_back(r);
    }
    const int l = static_cast<int>(tree.nodes.size());
    make_leaf(std::move(left), leaf.depth + 1);
    const int r = static_cast<int>(tree.nodes.size());
    make_leaf(std::move(right), leaf.depth + 1);
    auto& nd = tree.nodes[static_cast<std::size_t>(leaf.node)];
    nd.feature = leaf.split.feature;
    nd.threshold = binned.threshold(f, leaf.split.bin);
    nd.gain = leaf.split.gain;
    nd.left = l;
    nd.right = r;
    ++n_leaves;
  }
  return tree;
}

Tree build_oblivious_tree(const BinnedMatrix& binned, const Vector& target, const TreeParams& params) {
  const std::size_t n = binned.rows();
  std::vector<int> group(n, 0);
  std::vector<std::pair<int, int>> levels;  // (feature, bin)
  std::vector<std::vector<double>> level_gains;
  const int max_depth = std::max(params.max_depth, 1);

  for (int level = 0; level < max_depth; ++level) {
    const std::size_t n_groups = std::size_t{1} << level;
    std::vector<double> g_sum(n_groups, 0.0);
    std::vector<int> g_cnt(n_groups, 0);
    for (std::size_t r = 0; r < n; ++r) {
      g_sum[static_cast<std::size_t>(group[r])] += target[static_cast<Eigen::Index>(r)];
      g_cnt[static_cast<std::size_t>(group[r])] += 1;
    }
    std::vector<double> g_mean(n_groups, 0.0);
    double total_sse = 0.0;
    double scale = 0.0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      if (g_cnt[g] > 0) g_mean[g] = g_sum[g] / g_cnt[g];
    }
    for (std::size_t r = 0; r < n; ++r) {
      const double d = target[static_cast<Eigen::Index>(r)] - g_mean[static_cast<std::size_t>(group[r])];
      total_sse += d * d;
      scale += g_mean[static_cast<std::size_t>(group[r])] * g_mean[static_cast<std::size_t>(group[r])];
    }
    if (!(total_sse > 1e-20 * (scale + static_cast<double>(n)))) break;

    double best_gain = 1e-12 * total_sse;
    int best_f = -1;
    int best_bin = -1;
    std::vector<double> hs;
    std::vector<int> hc;
    for (std::size_t f = 0; f < binned.cols(); ++f) {
      const auto bins = static_cast<std::size_t>(binned.bins(f));
      if (bins < 2) continue;
      hs.assign(n_groups * bins, 0.0);
      hc.assign(n_groups * bins, 0);
      for (std::size_t r = 0; r < n; ++r) {
        const auto g = static_cast<std::size_t>(group[r]);
        const auto c = binned.code(r, f);
        hs[g * bins + c] += target[static_cast<Eigen::Index>(r)] - g_mean[g];
        hc[g * bins + c] += 1;
      }
      // prefix sums per group, then total gain per cut
      for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t b = 1; b < bins; ++b) {
          hs[g * bins + b] += hs[g * bins + b - 1];
          hc[g * bins + b] += hc[g * bins + b - 1];
        }
      }
      for (std::size_t b = 0; b + 1 < bins; ++b) {
        double gain = 0.0;
        for (std::size_t g = 0; g < n_groups; ++g) {
          const int nl = hc[g * bins + b];
          const int nr = g_cnt[g] - nl;
          if (nl == 0 || nr == 0) continue;
          const double sl = hs[g * bins + b];
          gain += sl * sl / nl + sl * sl / nr;
        }
        if (gain > best_gain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_bin = static_cast<int>(b);
        }
      }
    }
    if (best_f < 0) break;

    std::vector<double> gains(n_groups, 0.0);
    {
      std::vector<double> sl(n_groups, 0.0);
      std::vector<int> nl(n_groups, 0);
      for (std::size_t r = 0; r < n; ++r) {
        if (binned.code(r, static_cast<std::size_t>(best_f)) <= best_bin) {
          const auto g = static_cast<std::size_t>(group[r]);
          sl[g] += target[static_cast<Eigen::Index>(r)] - g_mean[g];
          nl[g] += 1;
        }
      }
      for (std::size_t g = 0; g < n_groups; ++g) {
        const int nr = g_cnt[g] - nl[g];
        if (nl[g] > 0 && nr > 0) gains[g] = sl[g] * sl[g] / nl[g] + sl[g] * sl[g] / nr;
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      const int bit = binned.code(r, static_cast<std::size_t>(best_f)) <= best_bin ? 0 : 1;
      group[r] = 2 * group[r] + bit;
    }
    levels.emplace_back(best_f, best_bin);
    level_gains.push_back(std::move(gains));
  }

  // Materialize the complete tree in breadth-first order.
  const int depth = static_cast<int>(levels.size());
  const std::size_t n_leaves = std::size_t{1} << depth;
  std::vector<double> leaf_sum(n_leaves, 0.0);
  std::vector<int> leaf_cnt(n_leaves, 0);
  for (std::size_t r = 0; r < n; ++r) {
    leaf_sum[static_cast<std::size_t>(group[r])] += target[static_cast<Eigen::Index>(r)];
    leaf_cnt[static_cast<std::size_t>(group[r])] += 1;
  }
  Tree tree;
  tree.mode = GrowthMode::oblivious;
  tree.nodes.resize(2 * n_leaves - 1);
  for (int level = 0; level < depth; ++level) {
    const std::size_t first = (std::size_t{1} << level) - 1;
    const auto [f, bin] = levels[static_cast<std::size_t>(level)];
    for (std::size_t g = 0; g < (std::size_t{1} << level); ++g) {
      auto& nd = tree.nodes[first + g];
      nd.feature = f;
      nd.threshold = binned.threshold(static_cast<std::size_t>(f), bin);
      nd.left = static_cast<int>(2 * (first + g) + 1);
      nd.right = static_cast<int>(2 * (first + g) + 2);
      nd.gain = level_gains[static_cast<std::size_t>(level)][g];
    }
  }
  const std::size_t first_leaf = n_leaves - 1;
  for (std::size_t g = 0; g < n_leaves; ++g) {
    auto& nd = tree.nodes[first_leaf + g];
    nd.value = leaf_cnt[g] > 0 ? leaf_sum[g] / leaf_cnt[g] : 0.0;
    nd.samples = leaf_cnt[g];
  }
  // internal sample counts, bottom-up
  for (std::size_t i = first_leaf; i-- > 0;) {
    tree.nodes[i].samples = tree.nodes[2 * i + 1].samples + tree.nodes[2 * i + 2].samples;
  }
  return tree;
}

}  // namespace riskpref::models
