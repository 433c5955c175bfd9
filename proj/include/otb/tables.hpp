#pragma once

#include <optional>
#include <string>
#include <vector>

namespace otb {

struct TableCell {
  std::string row_label;
  std::string col_label;
  double value = 0.0;
  bool bold = false;
  std::string display;
  // Critical cells, value a and intercept b of a ln N + b, valid for N >= n_floor.
  std::optional<double> intercept;
  std::optional<long long> n_floor;
};

struct Table {
  int id = 0;
  std::string title;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<TableCell> cells;  // row-major

  const TableCell& at(std::size_t row, std::size_t col) const { return cells[row * cols.size() + col]; }
};

// Round up to the given number of decimals; a 1e-9 relative slack absorbs
// floating noise on values that are exact decimals.
double ceil_to(double x, int decimals);

Table generate_table(int id);

std::string table_text(const Table& t);
std::string table_csv(const Table& t);
std::string table_json(const Table& t);

}  // namespace otb
