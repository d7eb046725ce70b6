#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"

namespace riskpref::evaluation {

namespace {

constexpr std::array<std::string_view, 7> kColumns{"Model", "MAE", "MSE", "RMSE", "R-Squared", "RMSLE", "MAPE"};

std::vector<std::string> cells(const LeaderboardRow& row) {
  std::vector<std::string> out{std::string(models::display_name(row.family))};
  if (!row.metrics) {
    out.insert(out.end(), 6, "NA");
    return out;
  }
  const auto& m = *row.metrics;
  for (const double v : {m.mae, m.mse, m.rmse, m.r2, m.rmsle, m.mape}) out.push_back(fmt::format("{:.4f}", v));
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}, {"r2", m.r2},
          {"rmsle", m.rmsle}, {"mape", m.mape}, {"mape_effective_n", m.mape_effective_n}};
}

}  // namespace

std::string leaderboard_text(const EvalReport& report) {
  std::vector<std::vector<std::string>> table;
  table.emplace_back(kColumns.begin(), kColumns.end());
  for (const auto& r : report.rows) table.push_back(cells(r));
  std::vector<std::size_t> width(kColumns.size(), 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table[i];
    out += fmt::format("{:<{}}", row[0], width[0]);
    for (std::size_t c = 1; c < row.size(); ++c) out += fmt::format("  {:>{}}", row[c], width[c]);
    out += '\n';
    if (i == 0) {
      std::size_t total = width[0];
      for (std::size_t c = 1; c < width.size(); ++c) total += 2 + width[c];
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

std::string leaderboard_csv(const EvalReport& report) {
  std::string out;
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    if (c) out += ',';
    out += kColumns[c];
  }
  out += '\n';
  for (const auto& r : report.rows) {
    const auto row = cells(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_field(row[c]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json leaderboard_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.best_spec.params) params[k] = v;
    nlohmann::json j{{"model", models::display_name(r.family)},
                     {"family", models::family_key(r.family)},
                     {"params", params},
                     {"cv_score", r.cv_score},
                     {"beats_dummy", r.beats_dummy}};
    j["metrics"] = r.metrics ? metrics_json(*r.metrics) : nlohmann::json(nullptr);
    if (!r.error.empty()) j["error"] = r.error;
    rows.push_back(std::move(j));
  }
  return {{"format", "riskpref.leaderboard"},
          {"version", 1},
          {"sort_key", to_string(report.sort_key)},
          {"split", report.split},
          {"seed", report.seed},
          {"rows", std::move(rows)}};
}

LassoImportance lasso_importance(const models::FittedModel& model, std::span<const std::string> feature_names) {
  if (!models::is_linear(model.family())) {
    throw ValidationError("lasso importance needs a linear model, got '" +
                              std::string(models::family_key(model.family())) + "'",
                          "family");
  }
  const auto& coef = model.linear().coef;
  if (static_cast<std::size_t>(coef.size()) != feature_names.size()) {
    throw ValidationError("feature name count does not match the coefficient vector", "feature_names");
  }
  std::vector<std::size_t> idx;
  LassoImportance out;
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (coef[static_cast<Eigen::Index>(i)] != 0.0) {
      idx.push_back(i);
    } else {
      ++out.eliminated;
    }
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(coef[static_cast<Eigen::Index>(a)]) > std::abs(coef[static_cast<Eigen::Index>(b)]);
  });
  for (const auto i : idx) out.nonzero.emplace_back(feature_names[i], coef[static_cast<Eigen::Index>(i)]);
  return out;
}

std::string lasso_importance_csv(const LassoImportance& imp) {
  std::string out = "feature,coefficient\n";
  for (const auto& [name, c] : imp.nonzero) out += csv_field(name) + ',' + fmt::format("{}", c) + '\n';
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("quantile of an empty sample", "scores");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

BoxSummary box_summary(std::string model, std::span<const double> scores) {
  if (scores.size() < 4) {
    throw ValidationError("box summary needs at least 4 scores, got " + std::to_string(scores.size()), model);
  }
  std::vector<double> v(scores.begin(), scores.end());
  std::sort(v.begin(), v.end());
  BoxSummary b;
  b.model = std::move(model);
  b.q1 = quantile(v, 0.25);
  b.median = quantile(v, 0.5);
  b.q3 = quantile(v, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  bool first = true;
  for (const double s : v) {
    if (s < lo_fence || s > hi_fence) {
      b.outliers.push_back(s);
      continue;
    }
    if (first) b.min = s;
    b.max = s;
    first = false;
  }
  return b;
}

std::vector<BoxSummary> fold_distribution_export(const std::map<std::string, std::vector<double>>& scores) {
  std::vector<BoxSummary> out;
  for (const auto& [model, s] : scores) out.push_back(box_summary(model, s));
  return out;
}

std::string fold_distribution_csv(const std::vector<BoxSummary>& boxes) {
  std::string out = "model,min,q1,median,q3,max,outliers\n";
  for (const auto& b : boxes) {
    std::string outl;
    for (std::size_t i = 0; i < b.outliers.size(); ++i) outl += (i ? ";" : "") + fmt::format("{}", b.outliers[i]);
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(b.model), b.min, b.q1, b.median, b.q3, b.max, outl);
  }
  return out;
}

nlohmann::json fold_distribution_json(const std::vector<BoxSummary>& boxes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : boxes) {
    arr.push_back({{"model", b.model}, {"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3},
                   {"max", b.max}, {"outliers", b.outliers}});
  }
  return arr;
}

}  // namespace riskpref::evaluation
