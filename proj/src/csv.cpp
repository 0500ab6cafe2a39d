#include "ida/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ida/error.hpp"

namespace ida {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw Error(ErrorCode::InvalidConfig, "CSV header is empty");
}

void CsvTable::comment(const std::string& line) { comments_.push_back("# " + line); }

void CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_value(v));
  row(cells);
}

void CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) {
    throw Error(ErrorCode::InvalidConfig, "CSV row has " + std::to_string(cells.size()) +
                                              " cells, header has " +
                                              std::to_string(header_.size()));
  }
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) out += c + '\n';
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& r : rows_) out += r + '\n';
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  out << str();
  if (!out) throw Error(ErrorCode::ConfigError, "write to '" + path + "' failed");
}

}  // namespace ida
