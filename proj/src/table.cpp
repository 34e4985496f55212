#include "mispar/table.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "mispar/errors.hpp"

namespace mispar {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw DomainError("not a number: '" + s + "'");
  return v;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

bool Table::has_column(const std::string& name) const {
  for (const auto& c : columns_)
    if (c == name) return true;
  return false;
}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw MissingColumn("no column named '" + name + "'");
}

void Table::append_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw DimensionError("row has " + std::to_string(cells.size()) + " cells, table has " +
                         std::to_string(columns_.size()) + " columns");
  cells_.push_back(std::move(cells));
}

std::vector<double> Table::numeric(const std::string& name) const {
  const auto j = column_index(name);
  std::vector<double> out;
  out.reserve(cells_.size());
  for (const auto& row : cells_) out.push_back(parse_number(row[j]));
  return out;
}

namespace {

void write_field(std::ostream& os, const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) {
    os << f;
    return;
  }
  os << '"';
  for (char c : f) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

void write_record(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    write_field(os, fields[i]);
  }
  os << "\r\n";
}

// Reads one record; returns false at end of input.
bool read_record(std::istream& is, std::vector<std::string>& out) {
  out.clear();
  if (is.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  char c;
  while (is.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (is.peek() == '\n') is.get(c);
      break;
    } else if (c == '\n') {
      break;
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return true;
}

}  // namespace

void Table::write_csv(std::ostream& os) const {
  write_record(os, columns_);
  for (const auto& row : cells_) write_record(os, row);
}

std::string Table::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

Table Table::read_csv(std::istream& is) {
  std::vector<std::string> rec;
  if (!read_record(is, rec)) return Table{};
  Table t(rec);
  while (read_record(is, rec)) {
    if (rec.size() == 1 && rec[0].empty()) continue;
    t.append_row(rec);
  }
  return t;
}

Table Table::from_csv(const std::string& text) {
  std::istringstream is(text);
  return read_csv(is);
}

}  // namespace mispar
