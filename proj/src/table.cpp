#include "symtop/table.hpp"

#include <cstdio>
#include <sstream>

#include "symtop/errors.hpp"

namespace symtop {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

Table::Row& Table::Row::add(double value) {
  cells_.push_back(format_number(value));
  return *this;
}

Table::Row& Table::Row::add(int value) {
  cells_.push_back(std::to_string(value));
  return *this;
}

Table::Row& Table::Row::add(const std::string& text) {
  std::string cell = text;
  for (auto& ch : cell) {
    if (ch == ',' || ch == '\n') ch = ';';
  }
  cells_.push_back(std::move(cell));
  return *this;
}

Table::Row& Table::row() { return rows_.emplace_back(); }

void Table::write(std::ostream& out) const {
  auto write_line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  write_line(columns_);
  for (const auto& r : rows_) {
    if (r.cells_.size() != columns_.size()) {
      throw Error("table row has " + std::to_string(r.cells_.size()) + " cells, header has " +
                  std::to_string(columns_.size()));
    }
    write_line(r.cells_);
  }
}

std::string Table::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace symtop
