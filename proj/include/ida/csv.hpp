#pragma once

#include <string>
#include <vector>

namespace ida {

// Decimal with 12 significant digits; nan/inf spelled out.
std::string format_value(double v);

// '#' comment lines, one header row, then value rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void comment(const std::string& line);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

}  // namespace ida
