#pragma once

#include <string>
#include <vector>

#include "busim/types.hpp"

namespace busim::csv {

// Minimal CSV: comma-separated, first row is the header, no quoting (ids and
// categories must not contain commas), trailing '\r' tolerated, blank lines
// and '#' comment lines skipped. Errors carry file, 1-based line and column.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_of_row;  // source line per data row

  int column(const std::string& col) const;           // -1 when absent
  int require_column(const std::string& col) const;   // throws ValidationError

  const std::string& cell(size_t row, int col) const { return rows[row][col]; }
  double number(size_t row, int col) const;           // throws with location
  long long integer(size_t row, int col) const;
};

Table read_file(const std::string& path);
Table read_string(const std::string& text, const std::string& name);

std::string format_double(double v);  // shortest round-trip formatting

}  // namespace busim::csv
