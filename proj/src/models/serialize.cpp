#include "internal.hpp"
#include "riskpref/error.hpp"

namespace riskpref::models {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json vec_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string_view aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::sum:
      return "sum";
    case Aggregation::mean:
      return "mean";
    case Aggregation::weighted_median:
      return "weighted_median";
  }
  return "?";
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "sum") return Aggregation::sum;
  if (s == "mean") return Aggregation::mean;
  if (s == "weighted_median") return Aggregation::weighted_median;
  throw ValidationError("unknown aggregation '" + s + "'", "state.aggregation");
}

GrowthMode parse_mode(const std::string& s) {
  for (const auto m : {GrowthMode::depthwise, GrowthMode::leafwise, GrowthMode::oblivious}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown growth mode '" + s + "'", "state.trees.mode");
}

// Trees as nested arrays: one [feature, threshold, left, right, value, gain, samples] per node.
json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value, n.gain, n.samples}));
  return {{"mode", to_string(t.mode)}, {"nodes", std::move(nodes)}};
}

Tree tree_from_json(const json& j) {
  Tree t;
  t.mode = parse_mode(j.at("mode").get<std::string>());
  for (const auto& n : j.at("nodes")) {
    if (!n.is_array() || n.size() != 7) throw ValidationError("tree node must have 7 fields", "state.trees.nodes");
    TreeNode nd;
    nd.feature = n[0].get<int>();
    nd.threshold = n[1].get<double>();
    nd.left = n[2].get<int>();
    nd.right = n[3].get<int>();
    nd.value = n[4].get<double>();
    nd.gain = n[5].get<double>();
    nd.samples = n[6].get<int>();
    t.nodes.push_back(nd);
  }
  const auto size = static_cast<int>(t.nodes.size());
  if (size == 0) throw ValidationError("tree has no nodes", "state.trees.nodes");
  for (const auto& nd : t.nodes) {
    if (nd.feature >= 0 && (nd.left <= 0 || nd.left >= size || nd.right <= 0 || nd.right >= size)) {
      throw ValidationError("tree child index out of range", "state.trees.nodes");
    }
  }
  return t;
}

}  // namespace

nlohmann::json model_to_json(const FittedModel& model) {
  json state = std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantState>) {
          return {{"kind", "constant"}, {"value", s.value}};
        } else if constexpr (std::is_same_v<T, LinearState>) {
          return {{"kind", "linear"}, {"intercept", s.intercept}, {"coef", vec_to_json(s.coef)}};
        } else if constexpr (std::is_same_v<T, KnnState>) {
          return {{"kind", "knn"}, {"k", s.k}, {"rows", s.rows}, {"targets", vec_to_json(s.targets)}};
        } else {
          json trees = json::array();
          for (const auto& t : s.trees) trees.push_back(tree_to_json(t));
          return {{"kind", "ensemble"},
                  {"base", s.base},
                  {"aggregation", aggregation_name(s.aggregation)},
                  {"tree_weights", s.tree_weights},
                  {"trees", std::move(trees)}};
        }
      },
      model.state());
  json params = json::object();
  for (const auto& [k, v] : model.spec().params) params[k] = v;
  return {{"format", "riskpref.model"},
          {"version", kFormatVersion},
          {"family", family_key(model.family())},
          {"params", std::move(params)},
          {"seed", model.spec().seed},
          {"n_features", model.n_features()},
          {"info",
           {{"iterations", model.info().iterations},
            {"converged", model.info().converged},
            {"rank_deficient", model.info().rank_deficient}}},
          {"state", std::move(state)}};
}

FittedModel model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "riskpref.model") throw ValidationError("not a model document", "format");
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw ValidationError("unsupported model format version", "version");
    }
    ModelSpec spec;
    spec.family = parse_family(doc.at("family").get<std::string>());
    for (const auto& [k, v] : doc.at("params").items()) spec.params[k] = v.get<double>();
    spec.seed = doc.at("seed").get<std::uint64_t>();
    validate(spec);
    const auto n_features = doc.at("n_features").get<std::size_t>();
    FitInfo info;
    info.iterations = doc.at("info").at("iterations").get<int>();
    info.converged = doc.at("info").at("converged").get<bool>();
    info.rank_deficient = doc.at("info").at("rank_deficient").get<bool>();

    const auto& s = doc.at("state");
    const auto kind = s.at("kind").get<std::string>();
    ModelState state;
    if (kind == "constant") {
      state = ConstantState{s.at("value").get<double>()};
    } else if (kind == "linear") {
      LinearState ls{s.at("intercept").get<double>(), vec_from_json(s.at("coef"))};
      if (static_cast<std::size_t>(ls.coef.size()) != n_features) {
        throw ValidationError("coefficient count does not match n_features", "state.coef");
      }
      state = std::move(ls);
    } else if (kind == "knn") {
      KnnState ks;
      ks.k = s.at("k").get<int>();
      ks.n_features = n_features;
      ks.rows = s.at("rows").get<std::vector<double>>();
      ks.targets = vec_from_json(s.at("targets"));
      if (ks.rows.size() != n_features * static_cast<std::size_t>(ks.targets.size()) || ks.k < 1 ||
          ks.k > ks.targets.size()) {
        throw ValidationError("inconsistent neighbour store", "state");
      }
      state = std::move(ks);
    } else if (kind == "ensemble") {
      EnsembleState es;
      es.base = s.at("base").get<double>();
      es.aggregation = parse_aggregation(s.at("aggregation").get<std::string>());
      es.tree_weights = s.at("tree_weights").get<std::vector<double>>();
      for (const auto& t : s.at("trees")) es.trees.push_back(tree_from_json(t));
      for (const auto& t : es.trees) {
        for (const auto& nd : t.nodes) {
          if (nd.feature >= static_cast<int>(n_features)) throw ValidationError("split feature out of range", "state.trees");
        }
      }
      if (es.aggregation == Aggregation::weighted_median && es.tree_weights.size() != es.trees.size()) {
        throw ValidationError("tree weight count mismatch", "state.tree_weights");
      }
      state = std::move(es);
    } else {
      throw ValidationError("unknown state kind '" + kind + "'", "state.kind");
    }
    return FittedModel(std::move(spec), n_features, std::move(state), info);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model document: ") + e.what(), "model");
  }
}

}  // namespace riskpref::models
