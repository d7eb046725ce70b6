#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models {

// --- Tree ---------------------------------------------------------------------

double Tree::predict_row(const double* row, std::ptrdiff_t stride) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(i)];
    i = row[nd.feature * stride] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

Vector Tree::predict(const Matrix& X) const {
  Vector out(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) out[r] = predict_row(X.data() + r, X.rows());
  return out;
}

namespace {

template <class Fn>
void walk(const Tree& t, int node, int depth, Fn&& fn) {
  const auto& nd = t.nodes[static_cast<std::size_t>(node)];
  fn(nd, depth);
  if (nd.feature >= 0) {
    walk(t, nd.left, depth + 1, fn);
    walk(t, nd.right, depth + 1, fn);
  }
}

}  // namespace

int Tree::depth() const {
  int d = 0;
  if (nodes.empty()) return 0;
  walk(*this, 0, 0, [&](const TreeNode& nd, int depth) {
    if (nd.feature < 0) d = std::max(d, depth);
  });
  return d;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

std::vector<std::vector<std::pair<int, double>>> Tree::conditions_by_depth() const {
  std::vector<std::vector<std::pair<int, double>>> out;
  if (nodes.empty()) return out;
  walk(*this, 0, 0, [&](const TreeNode& nd, int depth) {
    if (nd.feature < 0) return;
    if (out.size() <= static_cast<std::size_t>(depth)) out.resize(static_cast<std::size_t>(depth) + 1);
    auto& level = out[static_cast<std::size_t>(depth)];
    const std::pair<int, double> cond{nd.feature, nd.threshold};
    if (std::find(level.begin(), level.end(), cond) == level.end()) level.push_back(cond);
  });
  return out;
}

// --- exact split search -------------------------------------------------------

namespace {

struct NodeStats {
  double weight = 0.0;
  double mean = 0.0;
  double sse = 0.0;
  int count = 0;
};

NodeStats node_stats(const Vector& y, const double* w, std::span<const int> rows) {
  NodeStats s;
  double sum = 0.0;
  for (const int r : rows) {
    s.weight += w ? w[r] : 1.0;
    sum += (w ? w[r] : 1.0) * y[r];
  }
  s.count = static_cast<int>(rows.size());
  if (s.weight <= 0.0) return s;
  s.mean = sum / s.weight;
  for (const int r : rows) {
    const double d = y[r] - s.mean;
    s.sse += (w ? w[r] : 1.0) * d * d;
  }
  return s;
}

bool splittable(const NodeStats& s, int min_samples_leaf) {
  if (s.count < 2 * min_samples_leaf || s.count < 2) return false;
  return s.sse > 1e-20 * s.weight * (s.mean * s.mean + 1.0);
}

double midpoint(double a, double b) {
  const double m = a + 0.5 * (b - a);
  return m >= b ? a : m;
}

// Scans one feature's presorted rows. Updates `best` when a strictly better
// split is found.
void scan_feature(const Matrix& X, const Vector& y, const double* w, std::span<const int> order, int feature,
                  const NodeStats& stats, int min_samples_leaf, bool random_threshold, Rng* rng,
                  SplitCandidate& best) {
  const auto* x = X.col(feature).data();
  const std::size_t m = order.size();
  const double lo = x[order.front()];
  const double hi = x[order.back()];
  if (!(lo < hi)) return;

  double random_thr = 0.0;
  if (random_threshold) {
    std::uniform_real_distribution<double> unif(lo, hi);
    random_thr = unif(*rng);
    if (random_thr >= hi) random_thr = lo;
  }

  double wl = 0.0;
  double sl = 0.0;
  const double total_s = 0.0;  // centered sums
  double total_w = stats.weight;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const int r = order[i];
    const double wr = w ? w[r] : 1.0;
    wl += wr;
    sl += wr * (y[r] - stats.mean);
    const double xa = x[r];
    const double xb = x[order[i + 1]];
    if (xa == xb) continue;
    if (random_threshold && !(xa <= random_thr && xb > random_thr)) continue;
    const int nl = static_cast<int>(i + 1);
    const int nr = static_cast<int>(m) - nl;
    if (nl < min_samples_leaf || nr < min_samples_leaf) {
      if (random_threshold) return;
      continue;
    }
    const double wrt = total_w - wl;
    if (wl <= 0.0 || wrt <= 0.0) continue;
    const double sr = total_s - sl;
    const double gain = sl * sl / wl + sr * sr / wrt;
    if (gain > best.gain) {
      best.gain = gain;
      best.feature = feature;
      best.threshold = random_threshold ? random_thr : midpoint(xa, xb);
    }
    if (random_threshold) return;
  }
}

}  // namespace

std::optional<SplitCandidate> cart_best_split(const Matrix& X, const Vector& y, std::span<const int> rows,
                                              int min_samples_leaf) {
  std::vector<int> all;
  if (rows.empty()) {
    all.resize(static_cast<std::size_t>(X.rows()));
    std::iota(all.begin(), all.end(), 0);
    rows = all;
  }
  const NodeStats stats = node_stats(y, nullptr, rows);
  if (!splittable(stats, min_samples_leaf)) return std::nullopt;
  SplitCandidate best;
  best.gain = 1e-12 * stats.sse;
  std::vector<int> order(rows.begin(), rows.end());
  for (int f = 0; f < X.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return X(a, f) < X(b, f); });
    scan_feature(X, y, nullptr, order, f, stats, min_samples_leaf, false, nullptr, best);
  }
  if (best.feature < 0) return std::nullopt;
  return best;
}

// --- ExactTreeBuilder ---------------------------------------------------------

ExactTreeBuilder::ExactTreeBuilder(const Matrix& X) : x_(X), sorted_(static_cast<std::size_t>(X.cols())) {
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& order = sorted_[static_cast<std::size_t>(f)];
    order.resize(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return X(a, f) < X(b, f); });
  }
}

namespace {

struct GrowContext {
  const Matrix& x;
  const Vector& y;
  const double* w;
  const TreeParams& params;
  Rng* rng;
  int n_candidates;
  std::vector<int> feature_pool;
  std::vector<char> goes_left;
  Tree tree;
};

int grow(GrowContext& ctx, std::vector<std::vector<int>>& order, int depth) {
  const int node = static_cast<int>(ctx.tree.nodes.size());
  ctx.tree.nodes.emplace_back();
  const std::span<const int> rows = order.front();
  const NodeStats stats = node_stats(ctx.y, ctx.w, rows);
  {
    auto& nd = ctx.tree.nodes.back();
    nd.value = stats.mean;
    nd.samples = stats.count;
  }
  const bool depth_ok = ctx.params.max_depth <= 0 || depth < ctx.params.max_depth;
  if (!depth_ok || !splittable(stats, ctx.params.min_samples_leaf)) return node;

  const int p = static_cast<int>(order.size());
  if (ctx.n_candidates < p) {
    // partial Fisher-Yates; candidates are then visited in ascending index order
    for (int i = 0; i < ctx.n_candidates; ++i) {
      std::uniform_int_distribution<int> pick(i, p - 1);
      std::swap(ctx.feature_pool[static_cast<std::size_t>(i)],
                ctx.feature_pool[static_cast<std::size_t>(pick(*ctx.rng))]);
    }
    std::sort(ctx.feature_pool.begin(), ctx.feature_pool.begin() + ctx.n_candidates);
  }
  SplitCandidate best;
  best.gain = 1e-12 * stats.sse;
  for (int c = 0; c < ctx.n_candidates; ++c) {
    const int f = ctx.feature_pool[static_cast<std::size_t>(c)];
    scan_feature(ctx.x, ctx.y, ctx.w, order[static_cast<std::size_t>(f)], f, stats, ctx.params.min_samples_leaf,
                 ctx.params.random_thresholds, ctx.rng, best);
  }
  if (ctx.n_candidates < p) std::sort(ctx.feature_pool.begin(), ctx.feature_pool.end());
  if (best.feature < 0) return node;

  const auto* xf = ctx.x.col(best.feature).data();
  for (const int r : rows) ctx.goes_left[static_cast<std::size_t>(r)] = xf[r] <= best.threshold ? 1 : 0;
  std::vector<std::vector<int>> left(order.size());
  std::vector<std::vector<int>> right(order.size());
  for (std::size_t f = 0; f < order.size(); ++f) {
    for (const int r : order[f]) (ctx.goes_left[static_cast<std::size_t>(r)] ? left[f] : right[f]).push_back(r);
  }
  order.clear();
  order.shrink_to_fit();

  const int l = grow(ctx, left, depth + 1);
  const int r = grow(ctx, right, depth + 1);
  auto& nd = ctx.tree.nodes[static_cast<std::size_t>(node)];
  nd.feature = best.feature;
  nd.threshold = best.threshold;
  nd.gain = best.gain;
  nd.left = l;
  nd.right = r;
  return node;
}

}  // namespace

Tree ExactTreeBuilder::build(const Vector& y, std::span<const double> weights, const TreeParams& params,
                             Rng* rng) const {
  const auto n = static_cast<std::size_t>(x_.rows());
  if (static_cast<std::size_t>(y.size()) != n) throw ValidationError("target length does not match X", "y");
  if (!weights.empty() && weights.size() != n) throw ValidationError("weights length does not match X", "weights");
  const int p = static_cast<int>(x_.cols());
  const int n_candidates =
      params.max_features >= 1.0 ? p : std::max(1, static_cast<int>(params.max_features * p));
  if ((n_candidates < p || params.random_thresholds) && rng == nullptr) {
    throw Error("tree builder needs a random generator for feature sampling or random thresholds");
  }
  GrowContext ctx{x_, y, weights.empty() ? nullptr : weights.data(), params, rng, n_candidates, {}, {}, {}};
  ctx.feature_pool.resize(static_cast<std::size_t>(p));
  std::iota(ctx.feature_pool.begin(), ctx.feature_pool.end(), 0);
  ctx.goes_left.assign(n, 0);
  ctx.tree.mode = GrowthMode::depthwise;

  std::vector<std::vector<int>> order(static_cast<std::size_t>(std::max(p, 1)));
  if (p == 0) {
    for (std::size_t r = 0; r < n; ++r) {
      if (weights.empty() || weights[r] > 0) order[0].push_back(static_cast<int>(r));
    }
  } else {
    for (int f = 0; f < p; ++f) {
      auto& dst = order[static_cast<std::size_t>(f)];
      dst.reserve(n);
      for (const int r : sorted_[static_cast<std::size_t>(f)]) {
        if (weights.empty() || weights[static_cast<std::size_t>(r)] > 0) dst.push_back(r);
      }
    }
  }
  if (order.front().empty()) throw ValidationError("tree needs at least one row with positive weight", "weights");
  if (p == 0) {
    const NodeStats s = node_stats(y, ctx.w, order.front());
    TreeNode leaf;
    leaf.value = s.mean;
    leaf.samples = s.count;
    ctx.tree.nodes.push_back(leaf);
    return ctx.tree;
  }
  grow(ctx, order, 0);
  return std::move(ctx.tree);
}

}  // namespace riskpref::models
