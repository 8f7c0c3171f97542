#include "stakesim/cli/output.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace stakesim::cli {

void Table::add(std::vector<Cell> row) {
  row.resize(columns.size());
  rows.push_back(std::move(row));
}

namespace {

struct CellText {
  std::string operator()(std::monostate) const { return ""; }
  std::string operator()(const std::string& s) const { return s; }
  std::string operator()(double v) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  std::string operator()(std::uint64_t v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_csv_line(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_escape(fields[i]);
  os << "\n";
}

}  // namespace

std::string format_cell(const Cell& cell) { return std::visit(CellText{}, cell); }

void write_csv(std::ostream& os, const Table& table) {
  write_csv_line(os, table.columns);
  std::vector<std::string> fields;
  for (const auto& row : table.rows) {
    fields.clear();
    for (const auto& cell : row) fields.push_back(format_cell(cell));
    write_csv_line(os, fields);
  }
}

void write_json(std::ostream& os, const Table& table) {
  nlohmann::ordered_json doc;
  doc["columns"] = table.columns;
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      const auto& name = table.columns[i];
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>)
              obj[name] = nullptr;
            else if constexpr (std::is_same_v<T, double>)
              obj[name] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
            else
              obj[name] = v;
          },
          row[i]);
    }
    rows.push_back(std::move(obj));
  }
  os << doc.dump(2) << "\n";
}

}  // namespace stakesim::cli
