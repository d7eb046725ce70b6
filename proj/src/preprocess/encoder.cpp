#include <cmath>

#include "riskpref/error.hpp"
#include "riskpref/preprocess.hpp"

namespace riskpref::preprocess {

double mestimate(std::size_t count, double category_mean, double global_mean, double smoothing) {
  const auto c = static_cast<double>(count);
  if (c + smoothing == 0.0) return global_mean;
  return (c * category_mean + smoothing * global_mean) / (c + smoothing);
}

double MEstimateEncoder::encode_value(const CategoryMap& map, std::optional<double> value) const {
  if (!value) return map.missing_level ? map.missing_level->encoded : global_mean;
  const auto it = map.levels.find(*value);
  return it == map.levels.end() ? global_mean : it->second.encoded;
}

MEstimateEncoder fit_mestimate(const DataTable& train, std::span<const double> target, double smoothing) {
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw ValidationError("M must be >= 0", "M");
  if (target.size() != train.rows()) throw ValidationError("target length does not match table rows", "target");
  double total = 0.0;
  for (const double t : target) {
    if (!std::isfinite(t)) throw ValidationError("target has non-finite values", "target");
    total += t;
  }
  MEstimateEncoder enc;
  enc.smoothing = smoothing;
  enc.global_mean = target.empty() ? 0.0 : total / static_cast<double>(target.size());
  for (const auto& col : train.columns()) {
    if (col.kind != FeatureKind::categorical) continue;
    CategoryMap map;
    map.feature = col.name;
    std::map<double, std::pair<std::size_t, double>> acc;
    std::pair<std::size_t, double> missing{0, 0.0};
    for (std::size_t r = 0; r < train.rows(); ++r) {
      auto& slot = col.is_missing(r) ? missing : acc[col.values[r]];
      slot.first += 1;
      slot.second += target[r];
    }
    auto level = [&](const std::pair<std::size_t, double>& a) {
      CategoryLevel l;
      l.count = a.first;
      l.target_mean = a.second / static_cast<double>(a.first);
      l.encoded = mestimate(l.count, l.target_mean, enc.global_mean, smoothing);
      return l;
    };
    for (const auto& [value, a] : acc) map.levels.emplace(value, level(a));
    if (missing.first > 0) map.missing_level = level(missing);
    enc.features.push_back(std::move(map));
  }
  return enc;
}

DataTable encode(const MEstimateEncoder& encoder, const DataTable& table) {
  DataTable out = table;
  for (const auto& map : encoder.features) {
    const auto idx = out.index_of(map.feature);
    if (!idx) throw ValidationError("table lacks encoded column '" + map.feature + "'", map.feature);
    auto& col = out.columns()[*idx];
    for (std::size_t r = 0; r < out.rows(); ++r) {
      const std::optional<double> v = col.is_missing(r) ? std::nullopt : std::optional<double>(col.values[r]);
      col.values[r] = encoder.encode_value(map, v);
      col.missing[r] = 0;
    }
    col.kind = FeatureKind::numerical;
  }
  return out;
}

nlohmann::json encoder_to_json(const MEstimateEncoder& encoder) {
  using nlohmann::json;
  json features = json::array();
  auto level_json = [](const CategoryLevel& l) {
    return json{{"count", l.count}, {"target_mean", l.target_mean}, {"encoded", l.encoded}};
  };
  for (const auto& m : encoder.features) {
    json levels = json::array();
    for (const auto& [value, l] : m.levels) {
      auto j = level_json(l);
      j["value"] = value;
      levels.push_back(std::move(j));
    }
    json f{{"feature", m.feature}, {"levels", std::move(levels)}};
    f["missing"] = m.missing_level ? level_json(*m.missing_level) : json(nullptr);
    features.push_back(std::move(f));
  }
  return {{"format", "riskpref.mestimate"},
          {"version", 1},
          {"smoothing", encoder.smoothing},
          {"global_mean", encoder.global_mean},
          {"features", std::move(features)}};
}

MEstimateEncoder encoder_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "riskpref.mestimate" || doc.at("version") != 1) {
      throw ValidationError("not an encoder document (version 1)", "format");
    }
    MEstimateEncoder enc;
    enc.smoothing = doc.at("smoothing").get<double>();
    enc.global_mean = doc.at("global_mean").get<double>();
    auto level = [](const nlohmann::json& j) {
      return CategoryLevel{j.at("count").get<std::size_t>(), j.at("target_mean").get<double>(),
                           j.at("encoded").get<double>()};
    };
    for (const auto& f : doc.at("features")) {
      CategoryMap m;
      m.feature = f.at("feature").get<std::string>();
      for (const auto& l : f.at("levels")) m.levels.emplace(l.at("value").get<double>(), level(l));
      if (!f.at("missing").is_null()) m.missing_level = level(f.at("missing"));
      enc.features.push_back(std::move(m));
    }
    return enc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed encoder document: ") + e.what(), "encoder");
  }
}

}  // namespace riskpref::preprocess
