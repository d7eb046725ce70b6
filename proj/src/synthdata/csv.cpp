#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "riskpref/error.hpp"
#include "riskpref/synthdata.hpp"

namespace riskpref {

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_field(std::ostream& out, std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (const char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

// Splits one RFC-4180 record; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  for (;;) {
    const int ci = in.get();
    if (ci == std::char_traits<char>::eof()) {
      if (quoted) throw ValidationError("unterminated quoted field", "line " + std::to_string(line));
      fields.push_back(std::move(field));
      return true;
    }
    const char c = static_cast<char>(ci);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get();
      fields.push_back(std::move(field));
      return true;
    } else if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else {
      field.push_back(c);
    }
  }
}

double parse_number(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ValidationError("not a finite number: '" + text + "'", where);
  }
  return v;
}

}  // namespace

void write_csv(const DataTable& table, std::ostream& out) {
  const bool with_ids = !table.ids.empty();
  std::vector<std::string_view> header;
  if (with_ids) header.push_back(kIdColumn);
  for (const auto& c : table.columns()) header.push_back(c.name);
  if (table.mpl_avg_safe) header.push_back("mpl_avg_safe");
  if (table.risk_grq) header.push_back("risk_grq");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out << ',';
    write_field(out, header[i]);
  }
  out << "\r\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool first = true;
    auto sep = [&] {
      if (!first) out << ',';
      first = false;
    };
    if (with_ids) {
      sep();
      write_field(out, table.ids[r]);
    }
    for (const auto& c : table.columns()) {
      sep();
      if (!c.is_missing(r)) out << format_number(c.values[r]);
    }
    if (table.mpl_avg_safe) {
      sep();
      out << format_number((*table.mpl_avg_safe)[r]);
    }
    if (table.risk_grq) {
      sep();
      out << format_number((*table.risk_grq)[r]);
    }
    out << "\r\n";
  }
}

std::string to_csv(const DataTable& table) {
  std::ostringstream out;
  write_csv(table, out);
  return out.str();
}

DataTable read_csv(std::istream& in, const FeatureSchema* schema) {
  std::vector<std::string> header;
  std::size_t line = 1;
  if (!read_record(in, header, line)) throw ValidationError("empty CSV: missing header row", "header");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  enum class Role { id, feature, mpl, grq };
  std::vector<Role> roles;
  for (const auto& name : header) {
    if (name == kIdColumn) {
      roles.push_back(Role::id);
    } else if (name == "mpl_avg_safe") {
      roles.push_back(Role::mpl);
    } else if (name == "risk_grq") {
      roles.push_back(Role::grq);
    } else {
      roles.push_back(Role::feature);
    }
  }

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  while (read_record(in, fields, ++line)) {
    if (fields.size() == 1 && fields[0].empty() && header.size() != 1) continue;  // blank line
    if (fields.size() != header.size()) {
      throw ValidationError("expected " + std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()),
                            "line " + std::to_string(line));
    }
    records.push_back(fields);
  }

  const std::size_t n = records.size();
  DataTable table(n);
  std::vector<double> mpl;
  std::vector<double> grq;
  bool has_mpl = false;
  bool has_grq = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    switch (roles[c]) {
      case Role::id:
        for (const auto& rec : records) table.ids.push_back(rec[c]);
        break;
      case Role::mpl:
      case Role::grq: {
        auto& dest = roles[c] == Role::mpl ? mpl : grq;
        (roles[c] == Role::mpl ? has_mpl : has_grq) = true;
        for (std::size_t r = 0; r < n; ++r) {
          const std::string where = name + "[" + std::to_string(r) + "]";
          if (records[r][c].empty()) throw ValidationError("target values may not be missing", where);
          dest.push_back(parse_number(records[r][c], where));
        }
        break;
      }
      case Role::feature: {
        Column col{name, FeatureKind::numerical, std::vector<double>(n), std::vector<std::uint8_t>(n, 0)};
        if (schema) {
          if (const auto idx = schema->index_of(name)) col.kind = schema->entries[*idx].kind;
        }
        for (std::size_t r = 0; r < n; ++r) {
          if (records[r][c].empty()) {
            col.missing[r] = 1;
            col.values[r] = std::numeric_limits<double>::quiet_NaN();
          } else {
            col.values[r] = parse_number(records[r][c], name + "[" + std::to_string(r) + "]");
          }
        }
        table.add_column(std::move(col));
        break;
      }
    }
  }
  if (has_mpl) table.mpl_avg_safe = std::move(mpl);
  if (has_grq) table.risk_grq = std::move(grq);
  table.validate();
  return table;
}

DataTable read_csv_file(const std::string& path, const FeatureSchema* schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'", "path");
  return read_csv(in, schema);
}

void write_csv_file(const DataTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(table, out);
}

}  // namespace riskpref
