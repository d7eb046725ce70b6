// Synthetic register rows.
//
// Distribution manifest (parameters are configuration, not contract):
//   * three row latents: wealth w ~ N(0,1), income u correlated with w and
//     education, age ~ N(44, 11) truncated to [18, 67];
//   * income, pension and wealth/debt amounts are log-normal in those latents,
//     zero-inflated where a holding is optional (securities, other real estate,
//     entrepreneurial capital, study debt, ...); aggregates are exact sums of
//     their components, as in the register's wealth tree;
//   * categoricals are skewed multinomials, several tied to the latents
//     (percentile/decile codes, homeownership, education, household makeup);
//   * Age_squared is Age * Age.
// Features not in the manifest fall back to N(0,1) or a geometric-weight
// multinomial over the declared cardinality.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "riskpref/error.hpp"
#include "riskpref/random.hpp"
#include "riskpref/synthdata.hpp"

namespace riskpref {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

class RowDraw {
 public:
  explicit RowDraw(Rng& rng) : rng_(rng) {}

  double normal() { return normal_(rng_); }
  double uniform() { return uniform_(rng_); }
  bool bernoulli(double p) { return uniform() < p; }
  int categorical(std::initializer_list<double> weights) {
    std::discrete_distribution<int> d(weights);
    return d(rng_);
  }
  int geometric_code(int cardinality, double ratio = 0.7) {
    std::vector<double> w(static_cast<std::size_t>(cardinality));
    double v = 1.0;
    for (auto& x : w) {
      x = v;
      v *= ratio;
    }
    std::discrete_distribution<int> d(w.begin(), w.end());
    return d(rng_);
  }
  int poisson(double mean) {
    std::poisson_distribution<int> d(mean);
    return d(rng_);
  }

 private:
  Rng& rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Fills the 66 register values in dictionary order.
std::vector<double> draw_register_row(RowDraw& d) {
  double age = 0.0;
  do {
    age = 44.0 + 11.0 * d.normal();
  } while (age < 18.0 || age > 67.0);
  age = std::round(age);

  const double w = d.normal();
  const int education = [&] {
    const double e = 0.5 * w + d.normal();
    return e < -0.6 ? 0 : (e < 0.6 ? 1 : 2);
  }();
  const double u = 0.4 * w + 0.25 * (education - 1) + 0.85 * d.normal();
  const int sex = d.bernoulli(0.5) ? 1 : 0;
  const int migration = d.categorical({0.76, 0.11, 0.13});
  const int occupation = d.categorical({0.55, 0.38, 0.04, 0.03});
  const bool self_employed = occupation == 1 || occupation == 2;

  const double income = std::exp(10.45 + 0.45 * u - 0.0006 * (age - 48.0) * (age - 48.0));
  const double income_primary = income;
  const double income_net = 0.72 * income * std::exp(0.05 * d.normal());
  const double income_gross = 1.08 * income * std::exp(0.03 * d.normal());
  const double pension_employer_est =
      self_employed ? 0.02 * income * std::exp(0.3 * d.normal()) : 0.105 * income * std::exp(0.1 * d.normal());
  const double pension_employee_est =
      self_employed ? 0.01 * income * std::exp(0.3 * d.normal()) : 0.05 * income * std::exp(0.1 * d.normal());
  const double pension_employee_2nd = self_employed ? 0.0 : 0.055 * income * std::exp(0.15 * d.normal());
  const double pension_employer_2nd = self_employed ? 0.0 : 0.11 * income * std::exp(0.15 * d.normal());
  const double pension_3rd = d.bernoulli(0.3) ? std::exp(7.0 + 0.5 * w + 0.6 * d.normal()) : 0.0;
  const int incapacitation_band = self_employed ? 1 + d.categorical({0.3, 0.3, 0.2, 0.2}) : (d.bernoulli(0.1) ? 1 : 0);
  const int has_income = d.bernoulli(0.97) ? 1 : 0;

  const bool married = d.bernoulli(logistic((age - 33.0) / 6.0) * 0.75);
  const int marital = married ? 1 : d.categorical({0.70, 0.0, 0.22, 0.08});
  const int n_children = std::min(5, d.poisson(std::max(0.05, 2.1 * logistic((age - 31.0) / 5.0))));
  const int children_home = age < 52 ? std::min(n_children, n_children - d.poisson(0.2) * (n_children > 0)) : 0;
  const int children_home_clamped = std::clamp(children_home, 0, 5);
  const int children_coparent = std::clamp(n_children - children_home_clamped - d.poisson(0.1), 0, 5);
  const int deadborn = d.bernoulli(0.02) ? 1 : 0;
  const int n_coparents = n_children == 0 ? 0 : (d.bernoulli(0.86) ? 1 : (d.bernoulli(0.8) ? 2 : 3));
  const int last_coparent_same = married ? 1 : (d.bernoulli(0.3) ? 1 : 0);
  const int household_size_code = std::min(5, (married ? 1 : 0) + children_home_clamped);
  const int household_kids_code = std::min(4, children_home_clamped);
  const int household_type = [&] {
    if (d.bernoulli(0.01)) return 5;
    if (married) return children_home_clamped > 0 ? 2 : 1;
    if (children_home_clamped > 0) return 3;
    return d.bernoulli(0.9) ? 0 : 4;
  }();
  const int household_position = [&] {
    if (household_type == 0) return 0;
    if (household_type == 3) return 3;
    if (household_type == 5) return 5;
    return d.bernoulli(0.5) ? 1 : (d.bernoulli(0.9) ? 2 : 4);
  }();
  auto persist = [&](int code, int cardinality) {
    return d.bernoulli(0.95) ? code : d.geometric_code(cardinality);
  };

  const bool homeowner = d.bernoulli(logistic(0.4 + 1.2 * w + 0.03 * (age - 44.0)));
  const bool has_securities = d.bernoulli(logistic(-1.0 + 1.1 * w));
  const double bank = std::exp(9.3 + 0.6 * w + 0.3 * d.normal());
  const double securities = has_securities ? std::exp(9.0 + 1.0 * w + 0.8 * d.normal()) : 0.0;
  const double financial = bank + securities;
  const double securities_pct = 100.0 * securities / financial;
  const double house = homeowner ? std::exp(12.5 + 0.3 * w + 0.25 * d.normal()) : 0.0;
  const double other_real_estate = d.bernoulli(0.08) ? std::exp(11.5 + 0.5 * w + 0.6 * d.normal()) : 0.0;
  const double real_estate = house + other_real_estate;
  const double entrepreneurial =
      self_employed && d.bernoulli(0.6) ? std::exp(9.5 + 0.6 * w + 0.9 * d.normal()) : 0.0;
  const double substantial_interest = d.bernoulli(0.05) ? std::exp(10.5 + 0.8 * w + d.normal()) : 0.0;
  const double other_possessions = std::exp(7.8 + 0.4 * w + 0.6 * d.normal());
  const double possessions = financial + real_estate + entrepreneurial + substantial_interest + other_possessions;
  const double mortgage =
      homeowner ? house * std::max(0.0, 0.75 - 0.012 * (age - 30.0) + 0.1 * d.normal()) : 0.0;
  const double study_debt = age < 40.0 && d.bernoulli(0.45) ? std::exp(9.7 + 0.5 * d.normal()) : 0.0;
  const double other_debt = d.bernoulli(0.3) ? std::exp(8.3 + d.normal()) : 0.0;
  const double debt = mortgage + study_debt + other_debt;
  const double wealth_total = possessions - debt;
  const double wealth_excl_house = wealth_total - (house - mortgage);
  const double household_income = 0.55 * income * std::exp(0.25 * d.normal() + 0.1 * w);

  const int wealth_pct = std::clamp(static_cast<int>(100.0 * normal_cdf(0.95 * w + 0.3 * d.normal())), 0, 99);
  const int income_pct = std::clamp(static_cast<int>(100.0 * normal_cdf(0.8 * u + 0.45 * d.normal())), 0, 99);
  const int sbi = d.geometric_code(21, 0.82);
  const int sbi_self = self_employed ? d.geometric_code(21, 0.82) : 0;
  const int pension_fund = self_employed ? 0 : d.geometric_code(10, 0.6);
  const int soc_econ = occupation == 0 ? d.categorical({0.7, 0.3}) : (self_employed ? 2 + d.categorical({0.5, 0.3, 0.2}) : 5 + d.categorical({0.4, 0.4, 0.2}));
  const int self_class = self_employed ? 1 + d.categorical({0.4, 0.3, 0.2, 0.1}) : 0;
  const int self_type = self_employed ? 1 + d.categorical({0.6, 0.3, 0.1}) : 0;
  const int breadwinner_position = d.categorical({0.55, 0.3, 0.1, 0.05});
  const int income_source = occupation == 0 ? d.categorical({0.8, 0.1, 0.05, 0.03, 0.02}) : d.categorical({0.2, 0.65, 0.05, 0.05, 0.05});
  const int main_breadwinner = d.bernoulli(logistic(0.8 * u + (married ? -0.3 : 1.5))) ? 1 : 0;

  return {
      age,
      static_cast<double>(migration),
      static_cast<double>(household_type),
      static_cast<double>(household_position),
      static_cast<double>(household_size_code),
      static_cast<double>(household_kids_code),
      static_cast<double>(sbi),
      static_cast<double>(pension_fund),
      pension_employer_est,
      pension_employee_est,
      static_cast<double>(soc_econ),
      static_cast<double>(occupation),
      static_cast<double>(self_class),
      static_cast<double>(self_type),
      static_cast<double>(sbi_self),
      pension_employee_2nd,
      pension_employer_2nd,
      pension_3rd,
      static_cast<double>(incapacitation_band),
      static_cast<double>(has_income),
      income_primary,
      income_net,
      income_gross,
      static_cast<double>(persist(household_type, 6)),
      static_cast<double>(persist(household_position, 6)),
      static_cast<double>(persist(household_size_code, 6)),
      static_cast<double>(persist(household_kids_code, 5)),
      static_cast<double>(marital),
      static_cast<double>(wealth_pct),
      static_cast<double>(wealth_pct / 10),
      wealth_excl_house,
      wealth_total,
      possessions,
      financial,
      bank,
      securities,
      securities_pct,
      real_estate,
      house,
      other_real_estate,
      entrepreneurial,
      substantial_interest,
      other_possessions,
      debt,
      mortgage,
      study_debt,
      other_debt,
      homeowner ? 1.0 : 0.0,
      static_cast<double>(income_pct),
      static_cast<double>(income_pct / 10),
      household_income,
      static_cast<double>(education),
      static_cast<double>(breadwinner_position),
      static_cast<double>(income_source),
      static_cast<double>(n_children),
      static_cast<double>(children_home_clamped),
      static_cast<double>(children_coparent),
      static_cast<double>(deadborn),
      static_cast<double>(n_coparents),
      static_cast<double>(last_coparent_same),
      age * age,
      static_cast<double>(sex),
      static_cast<double>(main_breadwinner),
      has_securities ? 1.0 : 0.0,
      homeowner ? 1.0 : 0.0,
      n_children > 0 ? 1.0 : 0.0,
  };
}

const std::unordered_map<std::string, std::size_t>& manifest_index() {
  static const auto index = [] {
    std::unordered_map<std::string, std::size_t> m;
    const auto& entries = register_schema().entries;
    for (std::size_t i = 0; i < entries.size(); ++i) m.emplace(entries[i].name, i);
    return m;
  }();
  return index;
}

void validate_config(const FeatureSchema& schema, const GenConfig& config) {
  if (!(config.noise_sd >= 0.0) || !std::isfinite(config.noise_sd)) {
    throw ValidationError("noise_sd must be a finite value >= 0", "noise_sd");
  }
  if (!std::isfinite(config.intercept)) throw ValidationError("intercept must be finite", "intercept");
  for (const auto& [name, coef] : config.signal) {
    if (!schema.index_of(name)) throw ValidationError("unknown signal feature '" + name + "'", "signal." + name);
    if (!std::isfinite(coef)) throw ValidationError("signal coefficient must be finite", "signal." + name);
  }
}

}  // namespace

std::pair<DataTable, GroundTruth> generate(const FeatureSchema& schema, const GenConfig& config) {
  schema.validate();
  validate_config(schema, config);
  const std::size_t n = config.n_rows;
  const auto& manifest = manifest_index();

  DataTable table(n);
  std::vector<Column> columns;
  columns.reserve(schema.size());
  for (const auto& e : schema.entries) {
    columns.push_back(Column{e.name, e.kind, std::vector<double>(n), std::vector<std::uint8_t>(n, 0)});
  }

  for (std::size_t r = 0; r < n; ++r) {
    Rng rng = make_rng(config.seed, streams::kGenerateRow, r);
    RowDraw draw(rng);
    const std::vector<double> reg = draw_register_row(draw);
    for (std::size_t f = 0; f < schema.size(); ++f) {
      const auto& e = schema.entries[f];
      const auto it = manifest.find(e.name);
      double v = 0.0;
      if (it != manifest.end()) {
        v = reg[it->second];
        if (e.kind == FeatureKind::categorical) v = std::clamp(v, 0.0, static_cast<double>(e.cardinality - 1));
      } else {
        v = e.kind == FeatureKind::categorical ? draw.geometric_code(e.cardinality) : draw.normal();
      }
      columns[f].values[r] = v;
    }
  }
  for (auto& c : columns) table.add_column(std::move(c));
  table.ids.reserve(n);
  for (std::size_t r = 0; r < n; ++r) table.ids.push_back(std::to_string(r));

  GroundTruth truth;
  truth.intercept = config.intercept;
  truth.coefficients = config.signal;
  std::vector<const std::vector<double>*> signal_columns;
  for (const auto& [name, coef] : config.signal) {
    const auto& values = table.column(name).values;
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean = n > 0 ? mean / static_cast<double>(n) : 0.0;
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 1.0;
    if (!(sd > 0.0)) sd = 1.0;
    truth.feature_means.push_back(mean);
    truth.feature_sds.push_back(sd);
    signal_columns.push_back(&values);
    if (coef != 0.0) truth.informative.push_back(name);
  }

  std::vector<double> mpl(n);
  std::vector<double> grq(n);
  for (std::size_t r = 0; r < n; ++r) {
    double latent = config.intercept;
    for (std::size_t s = 0; s < config.signal.size(); ++s) {
      latent += config.signal[s].second * ((*signal_columns[s])[r] - truth.feature_means[s]) / truth.feature_sds[s];
    }
    Rng rng = make_rng(config.seed, streams::kGenerateNoise, r);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double e1 = noise(rng);
    const double e2 = noise(rng);
    mpl[r] = std::clamp(latent + config.noise_sd * e1, 0.0, 10.0);
    grq[r] = std::round(std::clamp(latent + config.noise_sd * e2, 0.0, 10.0));
  }
  if (config.target != GenTarget::risk_grq) table.mpl_avg_safe = std::move(mpl);
  if (config.target != GenTarget::mpl_avg_safe) table.risk_grq = std::move(grq);
  return {std::move(table), std::move(truth)};
}

DataTable apply_missingness(const DataTable& table, const FeatureSchema& schema, std::uint64_t seed) {
  schema.validate();
  DataTable out = table;
  std::vector<std::size_t> column_of(schema.size());
  for (std::size_t f = 0; f < schema.size(); ++f) {
    const auto idx = out.index_of(schema.entries[f].name);
    if (!idx) throw ValidationError("table lacks schema feature '" + schema.entries[f].name + "'",
                                    schema.entries[f].name);
    column_of[f] = *idx;
  }
  auto& columns = out.columns();
  std::unordered_map<std::string, double> block_draw;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    Rng rng = make_rng(seed, streams::kMissingness, r);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    block_draw.clear();
    for (std::size_t f = 0; f < schema.size(); ++f) {
      const auto& e = schema.entries[f];
      double draw = 0.0;
      if (e.missing_block.empty()) {
        draw = uniform(rng);
      } else {
        auto [it, inserted] = block_draw.emplace(e.missing_block, 0.0);
        if (inserted) it->second = uniform(rng);
        draw = it->second;
      }
      if (draw < e.missing_rate) {
        auto& c = columns[column_of[f]];
        c.missing[r] = 1;
        c.values[r] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return out;
}

GenConfig default_gen_config(std::size_t n_rows, std::uint64_t seed) {
  GenConfig config;
  config.n_rows = n_rows;
  config.seed = seed;
  config.noise_sd = 1.0;
  config.intercept = 5.0;
  config.target = GenTarget::both;
  config.signal = {
      {"Age_squared", -0.35},
      {"LFTENQ2", 0.20},
      {"VEHW1111BANH2019", 0.30},
      {"VEHW1200STOH2019", -0.25},
      {"INPPERSBRUT2019", 0.30},
      {"GBAGESLACHT", 0.40},
      {"SMODELRAMINGPENSIOENPREMIEWN2", 0.20},
      {"SECURITIESPERC2019", -0.30},
      {"OPLNIVSOI2016AGG1HBMETNIRWO2019", -0.20},
      {"INHGESTINKH2019", 0.15},
  };
  return config;
}

}  // namespace riskpref
