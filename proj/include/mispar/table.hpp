#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mispar {

/// %.12g, with `inf`, `-inf` and `nan` spelled out.
std::string format_number(double v);

/// Inverse of format_number; also accepts anything strtod does. Throws DomainError.
double parse_number(const std::string& s);

/// A rectangular table of text cells with named columns (RFC 4180 CSV on disk).
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return cells_.size(); }

  bool has_column(const std::string& name) const;
  /// Throws MissingColumn.
  std::size_t column_index(const std::string& name) const;

  void append_row(std::vector<std::string> cells);
  const std::string& cell(std::size_t row, std::size_t col) const { return cells_[row][col]; }

  /// Column parsed with parse_number.
  std::vector<double> numeric(const std::string& name) const;

  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
  static Table read_csv(std::istream& is);
  static Table from_csv(const std::string& text);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> cells_;
};

}  // namespace mispar
