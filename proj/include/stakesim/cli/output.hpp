#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace stakesim::cli {

/// One output cell; monostate is an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, std::string, double, std::uint64_t, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Appends a row; missing trailing cells are left empty.
  void add(std::vector<Cell> row);
};

/// Doubles use 17 significant digits.
std::string format_cell(const Cell& cell);

/// Header plus one line per row, RFC 4180 quoting where needed.
void write_csv(std::ostream& os, const Table& table);

/// {"columns": [...], "rows": [{column: value, ...}, ...]}
void write_json(std::ostream& os, const Table& table);

}  // namespace stakesim::cli
