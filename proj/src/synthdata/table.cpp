#include <cmath>
#include <cstring>

#include "riskpref/error.hpp"
#include "riskpref/synthdata.hpp"

namespace riskpref {

std::size_t Column::missing_count() const {
  std::size_t n = 0;
  for (const auto m : missing) n += m != 0 ? 1 : 0;
  return n;
}

const Column& DataTable::column(std::string_view name) const {
  const auto idx = index_of(name);
  if (!idx) throw ValidationError("no column named '" + std::string(name) + "'", std::string(name));
  return columns_[*idx];
}

std::optional<std::size_t> DataTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

void DataTable::add_column(Column column) {
  if (column.values.size() != rows_ || column.missing.size() != rows_) {
    throw ValidationError("column '" + column.name + "' length does not match table rows", column.name);
  }
  if (index_of(column.name)) throw ValidationError("duplicate column '" + column.name + "'", column.name);
  columns_.push_back(std::move(column));
}

bool DataTable::has_target(TargetKind target) const noexcept {
  return target == TargetKind::mpl_avg_safe ? mpl_avg_safe.has_value() : risk_grq.has_value();
}

const std::vector<double>& DataTable::target(TargetKind target) const {
  const auto& t = target == TargetKind::mpl_avg_safe ? mpl_avg_safe : risk_grq;
  if (!t) throw ValidationError("table has no '" + std::string(to_string(target)) + "' column", "target");
  return *t;
}

std::vector<std::string> DataTable::feature_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

DataTable DataTable::select_rows(std::span<const std::size_t> rows) const {
  DataTable out(rows.size());
  for (const auto r : rows) {
    if (r >= rows_) throw ValidationError("row index out of range", "rows");
  }
  if (!ids.empty()) {
    for (const auto r : rows) out.ids.push_back(ids[r]);
  }
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> o;
    o.reserve(rows.size());
    for (const auto r : rows) o.push_back(v[r]);
    return o;
  };
  if (mpl_avg_safe) out.mpl_avg_safe = pick(*mpl_avg_safe);
  if (risk_grq) out.risk_grq = pick(*risk_grq);
  for (const auto& c : columns_) {
    Column nc{c.name, c.kind, pick(c.values), {}};
    nc.missing.reserve(rows.size());
    for (const auto r : rows) nc.missing.push_back(c.missing[r]);
    out.columns_.push_back(std::move(nc));
  }
  return out;
}

void DataTable::validate() const {
  if (!ids.empty() && ids.size() != rows_) throw ValidationError("ids length mismatch", "id");
  for (const auto& c : columns_) {
    if (c.values.size() != rows_ || c.missing.size() != rows_) {
      throw ValidationError("column length mismatch", c.name);
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (c.missing[i] != 0 && !std::isnan(c.values[i])) {
        throw ValidationError("masked cell carries a value", c.name);
      }
      if (c.missing[i] == 0 && !std::isfinite(c.values[i])) {
        throw ValidationError("observed cell is not finite", c.name);
      }
    }
  }
  if (mpl_avg_safe) {
    if (mpl_avg_safe->size() != rows_) throw ValidationError("target length mismatch", "mpl_avg_safe");
    for (const double v : *mpl_avg_safe) {
      if (!(v >= 0.0 && v <= 10.0)) throw ValidationError("mpl_avg_safe outside [0,10]", "mpl_avg_safe");
    }
  }
  if (risk_grq) {
    if (risk_grq->size() != rows_) throw ValidationError("target length mismatch", "risk_grq");
    for (const double v : *risk_grq) {
      if (!(v >= 0.0 && v <= 10.0) || v != std::round(v)) {
        throw ValidationError("risk_grq must be an integer in 0..10", "risk_grq");
      }
    }
  }
}

namespace {
// NaN-aware, bitwise comparison so "identical tables" means byte-identical.
bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}
bool same_bits(const std::optional<std::vector<double>>& a, const std::optional<std::vector<double>>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_bits(*a, *b);
}
}  // namespace

bool operator==(const DataTable& a, const DataTable& b) {
  if (a.rows_ != b.rows_ || a.ids != b.ids || a.columns_.size() != b.columns_.size()) return false;
  if (!same_bits(a.mpl_avg_safe, b.mpl_avg_safe) || !same_bits(a.risk_grq, b.risk_grq)) return false;
  for (std::size_t i = 0; i < a.columns_.size(); ++i) {
    const auto& x = a.columns_[i];
    const auto& y = b.columns_[i];
    if (x.name != y.name || x.kind != y.kind || x.missing != y.missing || !same_bits(x.values, y.values)) {
      return false;
    }
  }
  return true;
}

}  // namespace riskpref
