#include <cmath>
#include <map>
#include <set>

#include "riskpref/error.hpp"
#include "riskpref/synthdata.hpp"

namespace riskpref {

std::string_view to_string(FeatureKind kind) noexcept {
  return kind == FeatureKind::categorical ? "categorical" : "numerical";
}

std::string_view to_string(FeatureGroup group) noexcept {
  return group == FeatureGroup::household ? "household" : "personal";
}

std::string_view to_string(TargetKind target) noexcept {
  return target == TargetKind::risk_grq ? "risk_grq" : "mpl_avg_safe";
}

TargetKind parse_target(std::string_view name) {
  if (name == "mpl_avg_safe") return TargetKind::mpl_avg_safe;
  if (name == "risk_grq") return TargetKind::risk_grq;
  throw ValidationError("unknown target '" + std::string(name) + "'", "target");
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t FeatureSchema::count(FeatureKind kind) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.kind == kind ? 1 : 0;
  return n;
}

double FeatureSchema::mean_missing_rate() const {
  if (entries.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : entries) total += e.missing_rate;
  return total / static_cast<double>(entries.size());
}

void FeatureSchema::validate() const {
  std::set<std::string> names;
  std::map<std::string, double> block_rates;
  for (const auto& e : entries) {
    const std::string field = "schema." + e.name;
    if (e.name.empty()) throw ValidationError("feature name must be non-empty", "schema");
    if (!names.insert(e.name).second) throw ValidationError("duplicate feature name", field);
    if (!(e.missing_rate >= 0.0 && e.missing_rate <= 1.0)) {
      throw ValidationError("missing_rate outside [0,1]", field + ".missing_rate");
    }
    if (e.kind == FeatureKind::categorical && e.cardinality < 2) {
      throw ValidationError("categorical feature needs cardinality >= 2", field + ".cardinality");
    }
    if (!e.missing_block.empty()) {
      auto [it, inserted] = block_rates.emplace(e.missing_block, e.missing_rate);
      if (!inserted && it->second != e.missing_rate) {
        throw ValidationError("members of block '" + e.missing_block + "' disagree on missing_rate",
                              field + ".missing_rate");
      }
    }
  }
}

nlohmann::json schema_to_json(const FeatureSchema& schema) {
  auto entries = nlohmann::json::array();
  for (const auto& e : schema.entries) {
    nlohmann::json j{{"name", e.name},
                     {"description", e.description},
                     {"kind", std::string(to_string(e.kind))},
                     {"missing_rate", e.missing_rate},
                     {"group", std::string(to_string(e.group))}};
    if (e.kind == FeatureKind::categorical) j["cardinality"] = e.cardinality;
    if (!e.missing_block.empty()) j["missing_block"] = e.missing_block;
    entries.push_back(std::move(j));
  }
  return {{"format", "riskpref.schema"}, {"version", 1}, {"entries", std::move(entries)}};
}

FeatureSchema schema_from_json(const nlohmann::json& doc) {
  FeatureSchema schema;
  try {
    for (const auto& j : doc.at("entries")) {
      FeatureDef e;
      e.name = j.at("name").get<std::string>();
      e.description = j.value("description", std::string{});
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "categorical") {
        e.kind = FeatureKind::categorical;
      } else if (kind == "numerical") {
        e.kind = FeatureKind::numerical;
      } else {
        throw ValidationError("unknown feature kind '" + kind + "'", "schema." + e.name + ".kind");
      }
      e.missing_rate = j.at("missing_rate").get<double>();
      e.cardinality = j.value("cardinality", 0);
      e.group = j.value("group", std::string("personal")) == "household" ? FeatureGroup::household
                                                                         : FeatureGroup::personal;
      e.missing_block = j.value("missing_block", std::string{});
      schema.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed schema document: ") + ex.what(), "schema");
  }
  schema.validate();
  return schema;
}

namespace {

constexpr auto C = FeatureKind::categorical;
constexpr auto N = FeatureKind::numerical;
constexpr auto P = FeatureGroup::personal;
constexpr auto H = FeatureGroup::household;

FeatureDef def(const char* name, const char* description, FeatureKind kind, double missing_pct,
               int cardinality, FeatureGroup group, const char* block = "") {
  return FeatureDef{name, description, kind, missing_pct / 100.0, kind == C ? cardinality : 0, group, block};
}

FeatureSchema build_register_schema() {
  FeatureSchema s;
  s.entries = {
      def("LFTENQ2", "Age", N, 0.14, 0, P),
      def("MIGRATIEACHTERGROND", "Migration Background", C, 0.14, 3, P),
      def("TYPHH2", "House Hold Type", C, 0.14, 6, H),
      def("PLHH2", "House Hold Position of Individual", C, 0.14, 6, H),
      def("AANTALPERSHH2", "House Hold Size", C, 0.14, 6, H),
      def("AANTALKINDHH2", "House Hold Amount of Children", C, 0.14, 5, H),
      def("SBI2", "Sector (SBI) Employee", C, 0.14, 21, P),
      def("SMODELRAMINGPF2", "Pension Fund", C, 0.14, 10, P),
      def("SMODELRAMINGPENSIOENPREMIEWG2", "Pension Contribution Employer", N, 36.27, 0, P, "pension_contribution"),
      def("SMODELRAMINGPENSIOENPREMIEWN2", "Pension Contribution Employee", N, 36.27, 0, P, "pension_contribution"),
      def("INPSECJ2019", "Occupation (Social-Economic Category)", C, 0.00, 8, P),
      def("OCCUPATION2019", "Occupation 4 Categories", C, 0.00, 4, P),
      def("INPZELFSTANDIGEPL12019", "Occupation Publication Classification Self-Employed", C, 0.00, 5, P),
      def("INPTYPZLF2019", "Occupation Type of Self-Employed", C, 0.00, 4, P),
      def("SBISELFEMPLOYED2019", "Sector (SBI) All Types Self-Employed", C, 0.00, 21, P),
      def("INPPN700PEN2019", "Contribution Pension Employee (2nd pillar)", N, 0.00, 0, P),
      def("INPPG710PEN2019", "Contribution Pension Employer (2nd pillar)", N, 0.00, 0, P),
      def("INPPH770OUP2019", "Contribution Private Insurance Old Age (3rd pillar)", N, 0.00, 0, P),
      def("INPPH570ZWP2019", "Contribution Private Insurance Incapacitation", C, 0.00, 5, P),
      def("INPPINK2019", "Income Individual Personal Y/N", C, 0.00, 2, P),
      def("INPPERSPRIM2019", "Income Individual Personal Primary", N, 0.00, 0, P),
      def("INPPERSINK2019", "Income Individual Personal", N, 0.14, 0, P),
      def("INPPERSBRUT2019", "Income Individual Personal Before-Tax", N, 0.14, 0, P),
      def("TYPHH2019", "House Hold Type", C, 0.14, 6, H),
      def("PLHH2019", "House Hold Position of Individual", C, 0.14, 6, H),
      def("AANTALPERSHH2019", "House Hold Size", C, 0.14, 6, H),
      def("AANTALKINDHH2019", "House Hold Amount of Children", C, 0.14, 5, H),
      def("GBABURGSTNWKLASSE42019", "Marital Status 4 Categories", C, 0.14, 4, P),
      def("VEHP100HVERM2019", "Wealth House Hold Percentiles", C, 0.14, 100, H),
      def("VEHP100HVERMKL12019", "Wealth House Hold Deciles", C, 0.14, 10, H),
      def("VEHWVEREXEWH2019", "Wealth House Hold Total Excluding House", N, 0.14, 0, H),
      def("VEHW1000VERH2019", "Wealth House Hold Total (1)", N, 0.14, 0, H),
      def("VEHW1100BEZH2019", "Wealth House Hold Posessions (1.1)", N, 0.14, 0, H),
      def("VEHW1110FINH2019", "Wealth House Hold Financial Possessions (1.1.1)", N, 0.14, 0, H),
      def("VEHW1111BANH2019", "Wealth House Hold Bank and Saving Balance (1.1.1.1)", N, 0.14, 0, H),
      def("VEHW1112EFFH2019", "Wealth House Hold Securities (1.1.1.2)", N, 0.14, 0, H),
      def("SECURITIESPERC2019", "Securities % of liquid wealth", N, 0.14, 0, H),
      def("VEHW1120ONRH2019", "Wealth House Hold Real Estate (1.1.2)", N, 0.14, 0, H),
      def("VEHW1121WONH2019", "Wealth House Hold House (1.1.2.1)", N, 0.14, 0, H),
      def("VEHW1122OGOH2019", "Wealth House Hold Other Real Estate (1.1.2.2)", N, 0.14, 0, H),
      def("VEHW1130ONDH2019", "Wealth House Hold Entrepreneurial Capacity (1.1.3)", N, 0.14, 0, H),
      def("VEHW1140ABEH2019", "Wealth House Hold Aanmerkelijk Belang (1.1.4)", N, 0.14, 0, H),
      def("VEHW1150OVEH2019", "Wealth House Hold Other Possessions (1.1.5)", N, 0.14, 0, H),
      def("VEHW1200STOH2019", "Debt House Hold total (1.2)", N, 0.14, 0, H),
      def("VEHW1210SHYH2019", "Debt House Hold Mortgage (1.2.1)", N, 0.14, 0, H),
      def("VEHW1220SSTH2019", "Debt House Hold Study (1.2.2)", N, 0.14, 0, H),
      def("VEHW1230SOVH2019", "Debt House Hold Other (1.2.3)", N, 0.14, 0, H),
      def("INHEHALGR2019", "House Hold Homeowner", C, 0.14, 2, H),
      def("INHP100HGEST2019", "Income House Hold Standardized Spendable Percentiles", C, 0.14, 100, H),
      def("INHP100HGESTKL12019", "Income House Hold Standardized Spendable Deciles", C, 0.14, 10, H),
      def("INHGESTINKH2019", "Income House Hold Standardized Spendable", N, 0.14, 0, H),
      def("OPLNIVSOI2016AGG1HBMETNIRWO2019", "Education Level 3 Categories", C, 0.14, 3, P),
      def("INPPOSHHK2019", "Position in household towards main breadwinner", C, 0.14, 4, H),
      def("INHBBIHJ2019", "Main source of household income", C, 0.14, 5, H),
      def("NRCHILDREN2019", "Number of Children", C, 0.14, 6, P),
      def("NRCHILDRENSAMEADRS2019", "Number of Children at Same Address as Individual", C, 31.90, 6, P, "children"),
      def("NRCHILDRENCOPARENTADRS2019", "Number of Children at Same Address as Co-Parent", C, 31.90, 6, P, "children"),
      def("DEADBORN2019", "Indicates Whether Child(ren) Was(Were) Deadborn", C, 31.90, 2, P, "children"),
      def("NRCOPARENTS2019", "Amount of People the Individual had Children With", C, 31.90, 4, P, "children"),
      def("LASTCOPARENTSAMEADRS2019", "Inidicates Whether Last Co-Parent at Same Address as Individual", C, 31.90, 2, P, "children"),
      def("Age_squared", "Squared value of the age", N, 0.14, 0, P),
      def("GBAGESLACHT", "Sex", C, 0.00, 2, P),
      def("MAINBREADWINNER2019", "Main Breadwinner", C, 0.00, 2, H),
      def("SECURITIESBIN2019", "Indicates whether household has securities", C, 0.00, 2, H),
      def("HOMEOWNER2019_", "Home owner", C, 0.00, 2, H),
      def("CHILDBIN2019", "Number of children born", C, 0.00, 2, P),
  };
  s.validate();
  return s;
}

}  // namespace

const FeatureSchema& register_schema() {
  static const FeatureSchema schema = build_register_schema();
  return schema;
}

}  // namespace riskpref
