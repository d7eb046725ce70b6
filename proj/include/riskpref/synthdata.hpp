#pragma once

// Register-style feature dictionary, the columnar DataTable that flows through
// the pipeline, and a deterministic synthetic generator standing in for the
// private register extract.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace riskpref {

enum class FeatureKind { categorical, numerical };
enum class FeatureGroup { personal, household };
enum class TargetKind { mpl_avg_safe, risk_grq };

std::string_view to_string(FeatureKind kind) noexcept;
std::string_view to_string(FeatureGroup group) noexcept;
std::string_view to_string(TargetKind target) noexcept;
TargetKind parse_target(std::string_view name);

inline constexpr std::string_view kIdColumn = "id";

struct FeatureDef {
  std::string name;
  std::string description;
  FeatureKind kind = FeatureKind::numerical;
  double missing_rate = 0.0;
  int cardinality = 0;  // >= 2 for categorical, 0 for numerical
  FeatureGroup group = FeatureGroup::personal;
  // Features sharing a non-empty block are masked together within a row.
  std::string missing_block;
};

struct FeatureSchema {
  std::vector<FeatureDef> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t count(FeatureKind kind) const;
  double mean_missing_rate() const;
  // Throws ValidationError on duplicate names, bad rates or cardinalities,
  // or blocks whose members disagree on their missing rate.
  void validate() const;
};

nlohmann::json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& doc);

// The 66-predictor dictionary (65 register features plus Age_squared), with
// their documented missing rates.
const FeatureSchema& register_schema();

struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::numerical;
  std::vector<double> values;        // NaN where missing
  std::vector<std::uint8_t> missing;  // 1 = masked

  bool is_missing(std::size_t row) const { return missing[row] != 0; }
  std::size_t missing_count() const;
};

class DataTable {
 public:
  DataTable() = default;
  explicit DataTable(std::size_t rows) : rows_(rows) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }

  std::vector<std::string> ids;  // empty or one per row
  std::optional<std::vector<double>> mpl_avg_safe;
  std::optional<std::vector<double>> risk_grq;

  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::vector<Column>& columns() noexcept { return columns_; }
  const Column& column(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws ValidationError if the length differs from rows() or the name exists.
  void add_column(Column column);

  bool has_target(TargetKind target) const noexcept;
  // Throws ValidationError if the target column is absent.
  const std::vector<double>& target(TargetKind target) const;
  std::vector<std::string> feature_names() const;

  DataTable select_rows(std::span<const std::size_t> rows) const;
  // Checks the structural invariants (lengths, masks, target ranges).
  void validate() const;

  friend bool operator==(const DataTable& a, const DataTable& b);

 private:
  std::size_t rows_ = 0;
  std::vector<Column> columns_;
};

enum class GenTarget { mpl_avg_safe, risk_grq, both };

struct GenConfig {
  std::size_t n_rows = 1000;
  std::uint64_t seed = 0;
  // Coefficients apply to standardized feature values.
  std::vector<std::pair<std::string, double>> signal;
  double noise_sd = 1.0;
  double intercept = 5.0;
  GenTarget target = GenTarget::both;
};

struct GroundTruth {
  double intercept = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;
  std::vector<std::string> informative;
  // Moments used to standardize each signal feature, parallel to coefficients.
  std::vector<double> feature_means;
  std::vector<double> feature_sds;
};

// Complete (unmasked) table: deterministic in config.seed, row-wise
// substreams so output does not depend on generation order.
std::pair<DataTable, GroundTruth> generate(const FeatureSchema& schema, const GenConfig& config);

// MCAR masking with each feature's rate; block members share one draw per row.
DataTable apply_missingness(const DataTable& table, const FeatureSchema& schema, std::uint64_t seed);

// The configuration behind the default synthetic dataset: ten informative
// register features (age squared, wealth, debt, income, sex, pension).
GenConfig default_gen_config(std::size_t n_rows, std::uint64_t seed);

// --- CSV ------------------------------------------------------------------
// Header: [id,] feature names..., then present targets. Missing cells are
// empty fields; RFC-4180 quoting; numbers in shortest round-trip form.
void write_csv(const DataTable& table, std::ostream& out);
std::string to_csv(const DataTable& table);
// Columns named "id", "mpl_avg_safe", "risk_grq" are recognised; others are
// features, typed from `schema` when it names them and numerical otherwise.
DataTable read_csv(std::istream& in, const FeatureSchema* schema = nullptr);
DataTable read_csv_file(const std::string& path, const FeatureSchema* schema = nullptr);
void write_csv_file(const DataTable& table, const std::string& path);

}  // namespace riskpref
