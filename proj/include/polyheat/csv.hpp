#pragma once

// Minimal CSV writer. Header row, '.' decimal separator, %.17g floats:
// identical inputs give byte-identical files.

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace polyheat::csv {

using Cell = std::variant<std::string, double, long long>;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<Cell> row) { rows_.push_back(std::move(row)); }

  void write(std::ostream& os) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      os << (i ? "," : "") << header_[i];
    os << "\n";
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ",";
        if (std::holds_alternative<std::string>(row[i]))
          os << std::get<std::string>(row[i]);
        else if (std::holds_alternative<double>(row[i]))
          os << format_double(std::get<double>(row[i]));
        else
          os << std::get<long long>(row[i]);
      }
      os << "\n";
    }
  }

  std::string str() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace polyheat::csv
