#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace symtop {

/// Numbers in output files: 12 significant digits, "%.12g".
std::string format_number(double value);

/// Comma-separated table with a header row. Cells are stored as text so a
/// missing value is simply an empty cell.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  class Row {
   public:
    Row& add(double value);
    Row& add(int value);
    Row& add(const std::string& text);
    Row& add(const char* text) { return add(std::string(text)); }
    Row& empty() { return add(std::string()); }

   private:
    friend class Table;
    std::vector<std::string> cells_;
  };

  Row& row();
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

  /// Throws Error when a row width differs from the header.
  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
};

}  // namespace symtop
